#include "seqreg/engine.hpp"

#include <cmath>
#include <string>

namespace seqreg {

namespace {

// Relative tolerance for recognizing a projected size that is an integer up
// to accumulated rounding (e.g. exact ratios like 34 / 0.8). Without this,
// strict_floor on a value epsilon above an intended integer would add a
// spurious extra observation.
constexpr double kIntegerSnapTol = 1e-9;

double snap_to_integer(double u) {
  const double r = std::round(u);
  if (std::fabs(u - r) <= kIntegerSnapTol * std::max(1.0, std::fabs(r))) {
    return r;
  }
  return u;
}

struct EngineState {
  RegressionFit fit;
  VarianceTracker* tracker;
  ObservationSource* source;
  long rows_absorbed = 0;
  RunStage stage = RunStage::pilot;
  std::optional<long> t_steps;
  std::optional<double> n_projected;
  std::optional<long> n_final;

  EngineState(long p, VarianceTracker& tr, ObservationSource& src)
      : fit(p), tracker(&tr), source(&src) {}

  PartialRun snapshot() const {
    return PartialRun{stage, fit, rows_absorbed, t_steps, n_projected,
                      n_final};
  }

  // Pulls `count` rows, feeding both the engine fit and the tracker. On a
  // short draw the partial rows are absorbed first, then the run aborts;
  // if the variance estimate never became defined the failure is reported
  // as a rank-deficient pilot.
  void absorb(std::size_t count) {
    if (count == 0) {
      return;
    }
    std::vector<Observation> rows = source->draw(count);
    fit.add_rows(rows);
    tracker->absorb(rows);
    rows_absorbed += static_cast<long>(rows.size());
    if (rows.size() < count) {
      const std::string what =
          "observation source exhausted: needed " + std::to_string(count) +
          " rows, got " + std::to_string(rows.size());
      if (!tracker->current_s2().has_value()) {
        throw RankDeficientPilot(count, rows.size(), snapshot(),
                                 what + " (variance estimate still undefined)");
      }
      throw SourceExhausted(count, rows.size(), snapshot(), what);
    }
  }
};

std::pair<StoppingResult, std::vector<TraceEntry>> run_impl(
    const ProcedureConfig& raw_cfg, ObservationSource& source,
    VarianceTracker& tracker, bool want_trace) {
  const ProcedureConfig cfg = validate_config(raw_cfg).config;
  EngineState st(cfg.p, tracker, source);
  std::vector<TraceEntry> trace;

  st.absorb(static_cast<std::size_t>(cfg.m));
  st.stage = RunStage::sequential;

  const double rate = cfg.rho * static_cast<double>(cfg.p) / cfg.b;
  long t = 0;
  for (;;) {
    const long n_current = cfg.m + cfg.k * t;
    const std::optional<double> s2 = tracker.current_s2();
    if (s2.has_value()) {
      const double threshold = rate * *s2;
      if (want_trace) {
        trace.push_back({n_current, *s2, threshold});
      }
      if (static_cast<double>(n_current) >= threshold) {
        break;
      }
    }
    // Undefined variance (rank-deficient so far) also keeps sampling: the
    // rule cannot be evaluated until the fit has full rank.
    st.t_steps = t;
    st.absorb(static_cast<std::size_t>(cfg.k));
    ++t;
  }

  st.t_steps = t;
  const long sequential_n = cfg.m + cfg.k * t;
  const double n_projected = static_cast<double>(sequential_n) / cfg.rho;
  st.n_projected = n_projected;
  const long n_final = strict_floor(snap_to_integer(n_projected)) + 1;
  st.n_final = n_final;

  st.stage = RunStage::topup;
  st.absorb(static_cast<std::size_t>(n_final - sequential_n));

  StoppingResult result{t, sequential_n, n_projected, n_final,
                        std::move(st.fit)};
  return {std::move(result), std::move(trace)};
}

}  // namespace

void FitVarianceTracker::absorb(std::span<const Observation> rows) {
  fit_.add_rows(rows);
}

std::optional<double> FitVarianceTracker::current_s2() const {
  if (fit_.n() <= fit_.p()) {
    return std::nullopt;
  }
  try {
    return fit_.solve().s2;
  } catch (const RankDeficient&) {
    return std::nullopt;
  }
}

StoppingResult run_procedure(const ProcedureConfig& cfg,
                             ObservationSource& source) {
  FitVarianceTracker tracker(validate_config(cfg).config.p);
  return run_impl(cfg, source, tracker, false).first;
}

StoppingResult run_procedure(const ProcedureConfig& cfg,
                             ObservationSource& source,
                             VarianceTracker& tracker) {
  return run_impl(cfg, source, tracker, false).first;
}

std::pair<StoppingResult, std::vector<TraceEntry>> run_procedure_traced(
    const ProcedureConfig& cfg, ObservationSource& source) {
  FitVarianceTracker tracker(validate_config(cfg).config.p);
  return run_impl(cfg, source, tracker, true);
}

std::pair<StoppingResult, std::vector<TraceEntry>> run_procedure_traced(
    const ProcedureConfig& cfg, ObservationSource& source,
    VarianceTracker& tracker) {
  return run_impl(cfg, source, tracker, true);
}

}  // namespace seqreg
