#include "seqreg/chisq.hpp"

#include <cmath>
#include <string>

#include "seqreg/errors.hpp"

namespace seqreg {

namespace {

constexpr double kConvergenceTol = 1e-14;
constexpr int kMaxIter = 20000;
constexpr double kEtaTermCutoff = 1e-15;
constexpr long kEtaTermCap = 1000000;

// Regularized lower incomplete gamma P(a, x) by its power series.
// Good for x < a + 1.
double gamma_p_series(double a, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kConvergenceTol) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw InvalidArgument("incomplete gamma series failed to converge (a = " +
                        std::to_string(a) + ", x = " + std::to_string(x) +
                        ")");
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction. Good for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kConvergenceTol) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw InvalidArgument(
      "incomplete gamma continued fraction failed to converge (a = " +
      std::to_string(a) + ", x = " + std::to_string(x) + ")");
}

// Q(a, x) = 1 - P(a, x), choosing whichever expansion converges fast.
double gamma_q(double a, double x) {
  if (x < a + 1.0) {
    return 1.0 - gamma_p_series(a, x);
  }
  return gamma_q_cf(a, x);
}

}  // namespace

double chi2_sf(double nu, double x) {
  if (!std::isfinite(nu) || nu <= 0.0) {
    throw InvalidArgument("chi2_sf: nu must be positive, got " +
                          std::to_string(nu));
  }
  if (!std::isfinite(x) || x < 0.0) {
    throw InvalidArgument("chi2_sf: x must be finite and >= 0, got " +
                          std::to_string(x));
  }
  if (x == 0.0) {
    return 1.0;
  }
  return gamma_q(nu / 2.0, x / 2.0);
}

double positive_part_excess(double nu, double c) {
  if (!std::isfinite(nu) || nu <= 0.0) {
    throw InvalidArgument("positive_part_excess: nu must be positive, got " +
                          std::to_string(nu));
  }
  if (!std::isfinite(c) || c < 0.0) {
    throw InvalidArgument(
        "positive_part_excess: c must be finite and >= 0, got " +
        std::to_string(c));
  }
  // Integrating x f_nu(x) over (c, inf) via x f_nu(x) = nu f_{nu+2}(x) gives
  // nu SF_{nu+2}(c); subtracting the c-mass leaves the mean excess.
  const double v = nu * chi2_sf(nu + 2.0, c) - c * chi2_sf(nu, c);
  return v < 0.0 ? 0.0 : v;
}

EtaValue eta(long k) {
  if (k < 1) {
    throw InvalidArgument("eta: k must be >= 1, got " + std::to_string(k));
  }
  EtaValue out;
  out.k = k;
  out.truncation_threshold = kEtaTermCutoff;

  double sum = 0.0;
  long n = 0;
  while (n < kEtaTermCap) {
    ++n;
    const double kn = static_cast<double>(k) * static_cast<double>(n);
    const double term =
        positive_part_excess(kn, 2.0 * kn) / static_cast<double>(n);
    if (std::fabs(term) < kEtaTermCutoff) {
      out.terms_used = n;
      break;
    }
    sum += term;
    out.terms_used = n;
  }
  out.value = (static_cast<double>(k) - 2.0) / 2.0 - sum;
  return out;
}

double projected_overshoot(long k, double rho) {
  if (!std::isfinite(rho) || rho <= 0.0 || rho > 1.0) {
    throw InvalidArgument("projected_overshoot: rho must be in (0, 1], got " +
                          std::to_string(rho));
  }
  return eta(k).value / rho;
}

}  // namespace seqreg
