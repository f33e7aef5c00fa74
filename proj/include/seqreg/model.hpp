#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqreg/errors.hpp"

namespace seqreg {

// One regression row: response plus its predictor vector (intercept included
// as a leading 1 when the design uses one).
struct Observation {
  double y = 0.0;
  std::vector<double> x;

  bool operator==(const Observation&) const = default;
};

// Parameters of the sampling procedure.
//
//   rho  fraction of the projected requirement taken sequentially
//   k    batch size per sequential step
//   m0   pilot batches beyond the parameter count
//   p    number of regression parameters
//   b    cost per unit of risk (risk target: stop near p*sigma^2 / b)
//   m    pilot size; derived as m0*k + p, kept for inspection
struct ProcedureConfig {
  double rho = 0.8;
  long k = 1;
  long m0 = 1;
  long p = 1;
  double b = 0.1;
  long m = 0;

  bool operator==(const ProcedureConfig&) const = default;
};

// Result of validating a configuration: the normalized config (m filled in)
// plus an optional advisory message when the pilot already looks big enough
// to swallow the whole sequential phase.
struct ConfigValidation {
  ProcedureConfig config;
  std::optional<std::string> advisory;
};

// Checks invariants, fills in m = m0*k + p, and (when a variance hint is
// available) warns if the pilot is at or beyond the projected stopping
// threshold. Throws InvalidConfig naming the violated field. Idempotent:
// validating the returned config again yields the same result.
ConfigValidation validate_config(ProcedureConfig cfg,
                                 std::optional<double> sigma2_hint = {});

// Unrounded sample size minimizing risk + sampling cost: p*sigma^2 / b.
double optimal_sample_size(double b, long p, double sigma2);

// Expected estimation loss per observation at sample size n: p*sigma^2 / n.
double theoretical_risk(long n, long p, double sigma2);

// Largest integer strictly smaller than u, so strict_floor(3.0) == 2.
long strict_floor(double u);

}  // namespace seqreg
