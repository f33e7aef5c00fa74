#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seqreg/engine.hpp"
#include "seqreg/model.hpp"

namespace seqreg {

// One synthetic predictor: drawn i.i.d. normal with this mean and variance.
struct PredictorSpec {
  double mean = 0.0;
  double variance = 1.0;

  bool operator==(const PredictorSpec&) const = default;
};

// A full simulation setup: the generating model plus the procedure to run
// on it and how many independent replications to take.
struct SimulationDesign {
  std::vector<double> beta_true;  // intercept first when intercept == true
  bool intercept = true;
  std::vector<PredictorSpec> predictors;
  double error_sd = 2.0;
  ProcedureConfig cfg;
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
};

// The benchmark design: E[Y] = 100 - 4 x1 + 3 x2 + 2 x3 with
// x1 ~ N(50, 9), x2 ~ N(200, 64), x3 ~ N(100, 25) and error sd 2.
SimulationDesign default_design(double b, long k, double rho, long m0);

// Checks coherence (dimensions, finite values, error_sd >= 0) and validates
// the embedded procedure config. Throws InvalidConfig.
SimulationDesign validate_design(SimulationDesign design);

// What one replication yields: the final sample size, the residual sd
// estimate, the realized estimation loss (computable because the true
// coefficients are known here), and the procedure's own plug-in risk
// estimate p * S^2_N / N (what a practitioner would report).
struct ReplicationOutcome {
  long n_final = 0;
  double sigma_hat = 0.0;
  double risk = 0.0;
  double est_risk = 0.0;

  bool operator==(const ReplicationOutcome&) const = default;
};

// Cross-replication summary of a study.
struct ReplicationSummary {
  double n_star = 0.0;   // optimal size p*sigma^2/b for the true sigma
  double n_bar = 0.0;    // mean final sample size
  double se_n = 0.0;     // standard error of n_bar
  double ratio = 0.0;    // n_bar / n_star
  double diff = 0.0;     // n_bar - n_star
  double sigma_bar = 0.0;
  double se_sigma = 0.0;
  double r_star = 0.0;       // theoretical risk at n_star (equals b)
  double r_bar = 0.0;        // mean realized loss
  double se_r = 0.0;
  double est_r_bar = 0.0;    // mean plug-in risk estimate p*S^2_N/N
  double se_est_r = 0.0;
  std::size_t replications = 0;
  long n_min = 0;
  long n_max = 0;
  std::vector<std::string> warnings;

  bool operator==(const ReplicationSummary&) const = default;
};

// Deterministic per-replication generator: the pair (seed, index) fully
// determines the stream, independent of which thread runs it.
std::mt19937_64 seed_stream(std::uint64_t seed, std::uint64_t index);

// Observation source that synthesizes rows from a SimulationDesign using a
// caller-owned engine.
class GenerativeSource final : public ObservationSource {
 public:
  GenerativeSource(const SimulationDesign& design, std::mt19937_64& rng);

  std::vector<Observation> draw(std::size_t count) override;

 private:
  const SimulationDesign& design_;
  std::mt19937_64& rng_;
  std::vector<std::normal_distribution<double>> predictor_dists_;
  std::normal_distribution<double> error_dist_;
};

// Runs the procedure once on freshly generated data.
ReplicationOutcome simulate_replication(const SimulationDesign& design,
                                        std::mt19937_64& rng);

// Runs the whole study, optionally across threads. Identical results for
// any worker count: replication r always uses seed_stream(seed, r) and the
// aggregation order is by replication index. A replication failure is
// rethrown as StudyError for the lowest failing index.
ReplicationSummary run_study(const SimulationDesign& design,
                             unsigned workers = 1);

}  // namespace seqreg
