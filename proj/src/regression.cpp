#include "seqreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqreg {

namespace {

constexpr double kPivotRatioMin = 1e-12;

}  // namespace

RegressionFit::RegressionFit(long p) : p_(p) {
  if (p < 1) {
    throw InvalidArgument("RegressionFit: p must be >= 1, got " +
                          std::to_string(p));
  }
  xtx_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0.0);
  xty_.assign(static_cast<std::size_t>(p), 0.0);
}

RegressionFit RegressionFit::from_rows(std::span<const Observation> rows,
                                       long p) {
  RegressionFit fit(p);
  fit.add_rows(rows);
  return fit;
}

void RegressionFit::add(const Observation& row) {
  if (static_cast<long>(row.x.size()) != p_) {
    throw DimensionMismatch("row has " + std::to_string(row.x.size()) +
                            " predictors, expected " + std::to_string(p_));
  }
  if (!std::isfinite(row.y)) {
    throw InvalidArgument("row response is not finite");
  }
  for (double v : row.x) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("row predictor is not finite");
    }
  }

  const auto up = static_cast<std::size_t>(p_);
  for (std::size_t i = 0; i < up; ++i) {
    const double xi = row.x[i];
    for (std::size_t j = i; j < up; ++j) {
      const double v = xi * row.x[j];
      xtx_[i * up + j] += v;
      if (j != i) {
        xtx_[j * up + i] += v;
      }
    }
    xty_[i] += xi * row.y;
  }
  yty_ += row.y * row.y;
  ++n_;
  beta_valid_ = false;
  solution_valid_ = false;
}

void RegressionFit::add_rows(std::span<const Observation> rows) {
  for (const Observation& row : rows) {
    add(row);
  }
}

RegressionFit RegressionFit::merged(const RegressionFit& other) const {
  if (other.p_ != p_) {
    throw DimensionMismatch("cannot merge fits with p = " +
                            std::to_string(p_) + " and p = " +
                            std::to_string(other.p_));
  }
  RegressionFit out(p_);
  out.n_ = n_ + other.n_;
  for (std::size_t i = 0; i < xtx_.size(); ++i) {
    out.xtx_[i] = xtx_[i] + other.xtx_[i];
  }
  for (std::size_t i = 0; i < xty_.size(); ++i) {
    out.xty_[i] = xty_[i] + other.xty_[i];
  }
  out.yty_ = yty_ + other.yty_;
  return out;
}

double RegressionFit::xtx(long i, long j) const {
  if (i < 0 || i >= p_ || j < 0 || j >= p_) {
    throw InvalidArgument("xtx index out of range");
  }
  return xtx_[static_cast<std::size_t>(i) * static_cast<std::size_t>(p_) +
              static_cast<std::size_t>(j)];
}

double RegressionFit::xty(long i) const {
  if (i < 0 || i >= p_) {
    throw InvalidArgument("xty index out of range");
  }
  return xty_[static_cast<std::size_t>(i)];
}

std::vector<double> RegressionFit::solve_xtx(std::span<const double> rhs)
    const {
  // LDL' factorization of the symmetric X'X. p is small here (a handful of
  // regression coefficients), so O(p^3) with no blocking is fine.
  const auto up = static_cast<std::size_t>(p_);
  std::vector<double> L(up * up, 0.0);
  std::vector<double> d(up, 0.0);

  double dmax = 0.0;
  for (std::size_t j = 0; j < up; ++j) {
    double dj = xtx_[j * up + j];
    for (std::size_t s = 0; s < j; ++s) {
      dj -= L[j * up + s] * L[j * up + s] * d[s];
    }
    if (!(dj > 0.0)) {
      throw RankDeficient("normal equations singular at pivot " +
                          std::to_string(j));
    }
    dmax = std::max(dmax, dj);
    if (dj < kPivotRatioMin * dmax) {
      throw RankDeficient("normal equations ill conditioned at pivot " +
                          std::to_string(j));
    }
    d[j] = dj;
    L[j * up + j] = 1.0;
    for (std::size_t i = j + 1; i < up; ++i) {
      double lij = xtx_[i * up + j];
      for (std::size_t s = 0; s < j; ++s) {
        lij -= L[i * up + s] * L[j * up + s] * d[s];
      }
      L[i * up + j] = lij / dj;
    }
  }

  // Forward solve L z = rhs, scale by D, back solve L' w = z.
  std::vector<double> z(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < up; ++i) {
    for (std::size_t s = 0; s < i; ++s) {
      z[i] -= L[i * up + s] * z[s];
    }
  }
  for (std::size_t i = 0; i < up; ++i) {
    z[i] /= d[i];
  }
  for (std::size_t ii = up; ii-- > 0;) {
    for (std::size_t s = ii + 1; s < up; ++s) {
      z[ii] -= L[s * up + ii] * z[s];
    }
  }
  return z;
}

const std::vector<double>& RegressionFit::coefficients() const {
  if (n_ < p_) {
    throw InsufficientData("coefficients need n >= p; have n = " +
                           std::to_string(n_) + ", p = " +
                           std::to_string(p_));
  }
  if (!beta_valid_) {
    beta_cache_ = solve_xtx(xty_);
    beta_valid_ = true;
  }
  return beta_cache_;
}

const FitSolution& RegressionFit::solve() const {
  if (n_ <= p_) {
    throw InsufficientData("variance estimate needs n >= p + 1; have n = " +
                           std::to_string(n_) + ", p = " +
                           std::to_string(p_));
  }
  if (!solution_valid_) {
    FitSolution sol;
    sol.beta = coefficients();
    double rss = yty_;
    for (std::size_t i = 0; i < sol.beta.size(); ++i) {
      rss -= sol.beta[i] * xty_[i];
    }
    if (rss < 0.0) {
      rss = 0.0;
      sol.s2_clamped = true;
    }
    sol.s2 = rss / static_cast<double>(n_ - p_);
    solution_cache_ = std::move(sol);
    solution_valid_ = true;
  }
  return solution_cache_;
}

std::vector<double> RegressionFit::coefficient_std_errors() const {
  const FitSolution& sol = solve();
  const auto up = static_cast<std::size_t>(p_);
  std::vector<double> se(up, 0.0);
  std::vector<double> e(up, 0.0);
  for (std::size_t j = 0; j < up; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    std::vector<double> col = solve_xtx(e);
    se[j] = std::sqrt(sol.s2 * col[j]);
  }
  return se;
}

bool RegressionFit::operator==(const RegressionFit& other) const {
  return p_ == other.p_ && n_ == other.n_ && xtx_ == other.xtx_ &&
         xty_ == other.xty_ && yty_ == other.yty_;
}

double loss_value(std::span<const double> beta_true,
                  const RegressionFit& fit) {
  if (static_cast<long>(beta_true.size()) != fit.p()) {
    throw DimensionMismatch("beta_true has " +
                            std::to_string(beta_true.size()) +
                            " entries, fit has p = " +
                            std::to_string(fit.p()));
  }
  const std::vector<double>& beta = fit.coefficients();
  const long p = fit.p();
  double q = 0.0;
  for (long i = 0; i < p; ++i) {
    const double di = beta[static_cast<std::size_t>(i)] - beta_true[i];
    for (long j = 0; j < p; ++j) {
      const double dj = beta[static_cast<std::size_t>(j)] - beta_true[j];
      q += di * fit.xtx(i, j) * dj;
    }
  }
  return q / static_cast<double>(fit.n());
}

double loss_value_inverse_weighted(std::span<const double> beta_true,
                                   const RegressionFit& fit) {
  if (static_cast<long>(beta_true.size()) != fit.p()) {
    throw DimensionMismatch("beta_true has " +
                            std::to_string(beta_true.size()) +
                            " entries, fit has p = " +
                            std::to_string(fit.p()));
  }
  const std::vector<double>& beta = fit.coefficients();
  const auto up = static_cast<std::size_t>(fit.p());
  std::vector<double> diff(up);
  for (std::size_t i = 0; i < up; ++i) {
    diff[i] = beta[i] - beta_true[static_cast<long>(i)];
  }
  std::vector<double> w = fit.solve_xtx(diff);
  double q = 0.0;
  for (std::size_t i = 0; i < up; ++i) {
    q += diff[i] * w[i];
  }
  return q * static_cast<double>(fit.n());
}

}  // namespace seqreg
