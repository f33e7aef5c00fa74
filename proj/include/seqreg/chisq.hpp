#pragma once

namespace seqreg {

// Upper tail P(X > x) for X ~ chi-squared with nu degrees of freedom.
// nu > 0 (need not be integral), x >= 0. Absolute error <= 1e-12.
double chi2_sf(double nu, double x);

// E[{X - c}+] for X ~ chi-squared_nu: the mean excess of X over the cut c,
// zero below it. Computed in closed form from two survival functions.
double positive_part_excess(double nu, double c);

// Asymptotic stopping overshoot constant for batch size k, with the
// bookkeeping of how the series was cut off.
struct EtaValue {
  long k = 0;
  double value = 0.0;
  // Terms of the series evaluated, including the final sub-threshold one.
  long terms_used = 0;
  double truncation_threshold = 0.0;
};

// eta(k) = (k - 2)/2 - sum_{n>=1} n^-1 E[{chi2_{kn} - 2kn}+], the series
// truncated at the first term smaller in magnitude than 1e-15 (that term is
// discarded), with a hard cap of 1e6 terms.
EtaValue eta(long k);

// First-order projected mean overshoot of the final sample size over the
// optimal one: eta(k) / rho.
double projected_overshoot(long k, double rho);

}  // namespace seqreg
