#pragma once

#include <span>
#include <vector>

#include "seqreg/errors.hpp"
#include "seqreg/model.hpp"

namespace seqreg {

// Output of a least-squares solve on the accumulated cross products.
struct FitSolution {
  std::vector<double> beta;
  double s2 = 0.0;
  // True when the residual sum of squares came out as a tiny negative from
  // cancellation and was clamped to zero.
  bool s2_clamped = false;

  bool operator==(const FitSolution&) const = default;
};

// Incremental least squares over X'X, X'y, y'y. Rows stream in one at a
// time or in batches; nothing is stored per row, so memory is O(p^2)
// regardless of sample size. Estimates come from an LDL' factorization of
// the accumulated normal equations.
class RegressionFit {
 public:
  explicit RegressionFit(long p);

  static RegressionFit from_rows(std::span<const Observation> rows, long p);

  void add(const Observation& row);
  void add_rows(std::span<const Observation> rows);

  // Accumulator-level merge: the result is as if both inputs' rows had been
  // added to one fit.
  RegressionFit merged(const RegressionFit& other) const;

  long n() const { return n_; }
  long p() const { return p_; }

  double xtx(long i, long j) const;
  double xty(long i) const;
  double yty() const { return yty_; }

  // Coefficient estimates; available once n >= p. Cached until the next add.
  const std::vector<double>& coefficients() const;

  // Coefficients plus the residual variance estimate s^2 = RSS / (n - p);
  // needs n >= p + 1. Cached until the next add.
  const FitSolution& solve() const;

  // sqrt(s2 * (X'X)^-1_jj) for each coefficient.
  std::vector<double> coefficient_std_errors() const;

  // Equality on the accumulators (n, X'X, X'y, y'y), not on caches.
  bool operator==(const RegressionFit& other) const;

  friend double loss_value_inverse_weighted(std::span<const double> beta_true,
                                            const RegressionFit& fit);

 private:
  // Solves (X'X) z = rhs via LDL'; throws RankDeficient when a pivot is
  // non-positive or the pivot spread exceeds 1e12.
  std::vector<double> solve_xtx(std::span<const double> rhs) const;

  long p_ = 0;
  long n_ = 0;
  std::vector<double> xtx_;  // row-major p x p, kept symmetric
  std::vector<double> xty_;
  double yty_ = 0.0;

  mutable bool beta_valid_ = false;
  mutable std::vector<double> beta_cache_;
  mutable bool solution_valid_ = false;
  mutable FitSolution solution_cache_;
};

// Scaled estimation loss n^-1 (b - beta)' X'X (b - beta) where b are the
// fitted coefficients. Needs only coefficients(), so it works from n >= p.
double loss_value(std::span<const double> beta_true, const RegressionFit& fit);

// Same quadratic form but with (X'X)^-1 as the weight, times n.
double loss_value_inverse_weighted(std::span<const double> beta_true,
                                   const RegressionFit& fit);

}  // namespace seqreg
