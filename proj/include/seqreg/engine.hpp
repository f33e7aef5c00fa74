#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "seqreg/errors.hpp"
#include "seqreg/model.hpp"
#include "seqreg/regression.hpp"

namespace seqreg {

// Anything that can hand out regression rows on demand. A draw may return
// fewer rows than requested; that is the exhaustion signal, after which
// further draws return empty.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  virtual std::vector<Observation> draw(std::size_t count) = 0;
};

// Supplies the variance estimate the stopping rule compares against. The
// default implementation runs its own regression; tests substitute scripted
// values to pin down the rule's arithmetic.
class VarianceTracker {
 public:
  virtual ~VarianceTracker() = default;
  virtual void absorb(std::span<const Observation> rows) = 0;
  // nullopt while the estimate is undefined (too few rows, or singular fit).
  virtual std::optional<double> current_s2() const = 0;
};

// Tracker backed by an incremental least-squares fit.
class FitVarianceTracker final : public VarianceTracker {
 public:
  explicit FitVarianceTracker(long p) : fit_(p) {}

  void absorb(std::span<const Observation> rows) override;
  std::optional<double> current_s2() const override;

  const RegressionFit& fit() const { return fit_; }

 private:
  RegressionFit fit_;
};

// One stopping-rule evaluation: the sample size at the check, the variance
// estimate used, and the threshold it was compared against.
struct TraceEntry {
  long n_current = 0;
  double s2 = 0.0;
  double threshold = 0.0;

  bool operator==(const TraceEntry&) const = default;
};

// Where a run was when it ended (or was cut short).
enum class RunStage { pilot, sequential, topup };

// Everything a completed run produces.
struct StoppingResult {
  long t_steps = 0;       // sequential batches taken after the pilot
  long sequential_n = 0;  // m + k * t_steps
  double n_projected = 0.0;  // (m + k*T) / rho, unrounded
  long n_final = 0;          // total rows in the returned fit
  RegressionFit fit;

  bool operator==(const StoppingResult&) const = default;
};

// Snapshot of an interrupted run: whatever had been accumulated, plus the
// stage-dependent quantities that were already determined.
struct PartialRun {
  RunStage stage = RunStage::pilot;
  RegressionFit fit;
  long rows_absorbed = 0;
  std::optional<long> t_steps;
  std::optional<double> n_projected;
  std::optional<long> n_final;
};

// The source ran dry before the procedure finished. Carries how much was
// asked for at the failing draw, how much arrived, and the partial state.
class SourceExhausted : public Error {
 public:
  SourceExhausted(std::size_t rows_needed, std::size_t rows_obtained,
                  PartialRun partial, const std::string& what)
      : Error(what),
        rows_needed_(rows_needed),
        rows_obtained_(rows_obtained),
        partial_(std::move(partial)) {}

  std::size_t rows_needed() const { return rows_needed_; }
  std::size_t rows_obtained() const { return rows_obtained_; }
  const PartialRun& partial() const { return partial_; }

 private:
  std::size_t rows_needed_;
  std::size_t rows_obtained_;
  PartialRun partial_;
};

// The source ran out while the variance estimate was still undefined, so the
// stopping rule never got a single evaluation.
class RankDeficientPilot : public SourceExhausted {
 public:
  using SourceExhausted::SourceExhausted;
};

// Runs the full procedure: pilot of m rows, then k-row batches until the
// first t with m + k*t >= rho * (p/b) * S^2 at sample size m + k*t, then
// projection N = strict_floor((m + k*T) / rho) + 1 and a final top-up of
// N - (m + k*T) rows. The returned fit contains all n_final rows. cfg is
// validated on entry.
StoppingResult run_procedure(const ProcedureConfig& cfg,
                             ObservationSource& source);
StoppingResult run_procedure(const ProcedureConfig& cfg,
                             ObservationSource& source,
                             VarianceTracker& tracker);

// Same, also returning one TraceEntry per stopping-rule evaluation.
std::pair<StoppingResult, std::vector<TraceEntry>> run_procedure_traced(
    const ProcedureConfig& cfg, ObservationSource& source);
std::pair<StoppingResult, std::vector<TraceEntry>> run_procedure_traced(
    const ProcedureConfig& cfg, ObservationSource& source,
    VarianceTracker& tracker);

}  // namespace seqreg
