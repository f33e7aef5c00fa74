#include "seqreg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "seqreg/regression.hpp"

namespace seqreg {

SimulationDesign default_design(double b, long k, double rho, long m0) {
  SimulationDesign d;
  d.beta_true = {100.0, -4.0, 3.0, 2.0};
  d.intercept = true;
  d.predictors = {{50.0, 9.0}, {200.0, 64.0}, {100.0, 25.0}};
  d.error_sd = 2.0;
  d.cfg = ProcedureConfig{rho, k, m0, 4, b, 0};
  d.replications = 10000;
  d.seed = 1;
  return d;
}

SimulationDesign validate_design(SimulationDesign design) {
  const long param_count =
      (design.intercept ? 1 : 0) + static_cast<long>(design.predictors.size());
  if (design.beta_true.empty()) {
    throw InvalidConfig("design: beta_true must not be empty");
  }
  if (static_cast<long>(design.beta_true.size()) != param_count) {
    throw InvalidConfig("design: beta_true has " +
                        std::to_string(design.beta_true.size()) +
                        " entries but the model has " +
                        std::to_string(param_count) + " parameters");
  }
  for (double bt : design.beta_true) {
    if (!std::isfinite(bt)) {
      throw InvalidConfig("design: beta_true entries must be finite");
    }
  }
  for (const PredictorSpec& ps : design.predictors) {
    if (!std::isfinite(ps.mean)) {
      throw InvalidConfig("design: predictor mean must be finite");
    }
    if (!std::isfinite(ps.variance) || ps.variance <= 0.0) {
      throw InvalidConfig(
          "design: predictor variance must be positive (a degenerate "
          "predictor would leave the fit rank deficient forever)");
    }
  }
  // error_sd == 0 is allowed: a noiseless model stops at the first check
  // with zero realized loss.
  if (!std::isfinite(design.error_sd) || design.error_sd < 0.0) {
    throw InvalidConfig("design: error_sd must be finite and >= 0");
  }
  if (design.replications < 1) {
    throw InvalidConfig("design: replications must be >= 1");
  }
  if (design.cfg.p != param_count) {
    throw InvalidConfig("design: cfg.p = " + std::to_string(design.cfg.p) +
                        " does not match the model's " +
                        std::to_string(param_count) + " parameters");
  }
  design.cfg = validate_config(design.cfg).config;
  return design;
}

std::mt19937_64 seed_stream(std::uint64_t seed, std::uint64_t index) {
  const auto lo = [](std::uint64_t v) {
    return static_cast<std::uint32_t>(v & 0xffffffffu);
  };
  const auto hi = [](std::uint64_t v) {
    return static_cast<std::uint32_t>(v >> 32);
  };
  std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index)};
  return std::mt19937_64(seq);
}

GenerativeSource::GenerativeSource(const SimulationDesign& design,
                                   std::mt19937_64& rng)
    : design_(design),
      rng_(rng),
      error_dist_(0.0, design.error_sd > 0.0 ? design.error_sd : 1.0) {
  predictor_dists_.reserve(design.predictors.size());
  for (const PredictorSpec& ps : design.predictors) {
    predictor_dists_.emplace_back(ps.mean, std::sqrt(ps.variance));
  }
}

std::vector<Observation> GenerativeSource::draw(std::size_t count) {
  std::vector<Observation> rows(count);
  const std::size_t p = design_.beta_true.size();
  for (Observation& row : rows) {
    row.x.reserve(p);
    if (design_.intercept) {
      row.x.push_back(1.0);
    }
    for (auto& dist : predictor_dists_) {
      row.x.push_back(dist(rng_));
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      mean += design_.beta_true[i] * row.x[i];
    }
    const double eps = design_.error_sd > 0.0 ? error_dist_(rng_) : 0.0;
    row.y = mean + eps;
  }
  return rows;
}

ReplicationOutcome simulate_replication(const SimulationDesign& design,
                                        std::mt19937_64& rng) {
  GenerativeSource source(design, rng);
  StoppingResult res = run_procedure(design.cfg, source);
  ReplicationOutcome out;
  out.n_final = res.n_final;
  const double s2 = res.fit.solve().s2;
  out.sigma_hat = std::sqrt(s2);
  out.risk = loss_value(design.beta_true, res.fit);
  out.est_risk = static_cast<double>(design.cfg.p) * s2 /
                 static_cast<double>(res.n_final);
  return out;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// se via {(R^2 - R)^-1 sum (x - mean)^2}^(1/2); zero for a single value.
MeanSe mean_se(const std::vector<double>& xs) {
  const auto r = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= r;
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (r * r - r))};
}

}  // namespace

ReplicationSummary run_study(const SimulationDesign& raw_design,
                             unsigned workers) {
  const SimulationDesign design = validate_design(raw_design);
  const std::size_t reps = design.replications;
  std::vector<ReplicationOutcome> out(reps);

  struct Failure {
    std::size_t index;
    std::string message;
  };

  const auto run_range = [&](std::size_t lo, std::size_t hi,
                             std::optional<Failure>& failure) {
    for (std::size_t r = lo; r < hi; ++r) {
      try {
        std::mt19937_64 rng = seed_stream(design.seed, r);
        out[r] = simulate_replication(design, rng);
      } catch (const std::exception& e) {
        if (!failure || r < failure->index) {
          failure = Failure{r, e.what()};
        }
        return;
      }
    }
  };

  unsigned nw = std::max(1u, workers);
  nw = static_cast<unsigned>(
      std::min<std::size_t>(nw, reps));
  std::vector<std::optional<Failure>> failures(nw);

  if (nw == 1) {
    run_range(0, reps, failures[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
      const std::size_t lo = reps * w / nw;
      const std::size_t hi = reps * (w + 1) / nw;
      threads.emplace_back(
          [&, lo, hi, w] { run_range(lo, hi, failures[w]); });
    }
    for (std::thread& th : threads) {
      th.join();
    }
  }

  std::optional<Failure> first;
  for (const auto& f : failures) {
    if (f && (!first || f->index < first->index)) {
      first = f;
    }
  }
  if (first) {
    throw StudyError(first->index, "replication " +
                                       std::to_string(first->index) +
                                       " failed: " + first->message);
  }

  std::vector<double> ns(reps), sigmas(reps), risks(reps), est_risks(reps);
  long n_min = out[0].n_final;
  long n_max = out[0].n_final;
  for (std::size_t r = 0; r < reps; ++r) {
    ns[r] = static_cast<double>(out[r].n_final);
    sigmas[r] = out[r].sigma_hat;
    risks[r] = out[r].risk;
    est_risks[r] = out[r].est_risk;
    n_min = std::min(n_min, out[r].n_final);
    n_max = std::max(n_max, out[r].n_final);
  }

  const MeanSe n_stat = mean_se(ns);
  const MeanSe sigma_stat = mean_se(sigmas);
  const MeanSe risk_stat = mean_se(risks);
  const MeanSe est_risk_stat = mean_se(est_risks);

  ReplicationSummary s;
  const double sigma2 = design.error_sd * design.error_sd;
  s.n_star = sigma2 > 0.0
                 ? optimal_sample_size(design.cfg.b, design.cfg.p, sigma2)
                 : 0.0;
  s.n_bar = n_stat.mean;
  s.se_n = n_stat.se;
  if (s.n_star > 0.0) {
    s.ratio = s.n_bar / s.n_star;
    s.r_star = static_cast<double>(design.cfg.p) * sigma2 / s.n_star;
  } else {
    s.ratio = 0.0;
    s.r_star = 0.0;
    s.warnings.push_back(
        "optimal sample size is zero (noiseless model); ratio and r_star "
        "reported as 0");
  }
  s.diff = s.n_bar - s.n_star;
  s.sigma_bar = sigma_stat.mean;
  s.se_sigma = sigma_stat.se;
  s.r_bar = risk_stat.mean;
  s.se_r = risk_stat.se;
  s.est_r_bar = est_risk_stat.mean;
  s.se_est_r = est_risk_stat.se;
  s.replications = reps;
  s.n_min = n_min;
  s.n_max = n_max;
  if (reps == 1) {
    s.warnings.push_back(
        "standard errors are undefined for a single replication; reporting "
        "0");
  }
  return s;
}

}  // namespace seqreg
