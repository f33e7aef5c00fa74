#include "seqreg/model.hpp"

#include <cmath>
#include <sstream>

namespace seqreg {

namespace {

[[noreturn]] void fail_config(const char* field, const std::string& detail) {
  std::ostringstream os;
  os << "invalid config: " << field << " " << detail;
  throw InvalidConfig(os.str());
}

}  // namespace

ConfigValidation validate_config(ProcedureConfig cfg,
                                 std::optional<double> sigma2_hint) {
  if (!std::isfinite(cfg.rho) || cfg.rho <= 0.0 || cfg.rho > 1.0) {
    fail_config("rho", "must be in (0, 1], got " + std::to_string(cfg.rho));
  }
  if (cfg.k < 1) {
    fail_config("k", "must be >= 1, got " + std::to_string(cfg.k));
  }
  if (cfg.m0 < 1) {
    fail_config("m0", "must be >= 1, got " + std::to_string(cfg.m0));
  }
  if (cfg.p < 1) {
    fail_config("p", "must be >= 1, got " + std::to_string(cfg.p));
  }
  if (!std::isfinite(cfg.b) || cfg.b <= 0.0) {
    fail_config("b", "must be positive, got " + std::to_string(cfg.b));
  }

  long derived_m = cfg.m0 * cfg.k + cfg.p;
  if (cfg.m != 0 && cfg.m != derived_m) {
    fail_config("m", "must equal m0*k + p = " + std::to_string(derived_m) +
                         ", got " + std::to_string(cfg.m));
  }
  cfg.m = derived_m;

  ConfigValidation out{cfg, std::nullopt};
  if (sigma2_hint) {
    if (!std::isfinite(*sigma2_hint) || *sigma2_hint < 0.0) {
      fail_config("sigma2_hint",
                  "must be a finite non-negative variance, got " +
                      std::to_string(*sigma2_hint));
    }
    double threshold = cfg.rho * static_cast<double>(cfg.p) * *sigma2_hint /
                       cfg.b;
    if (static_cast<double>(cfg.m) >= threshold) {
      std::ostringstream os;
      os << "pilot size m = " << cfg.m
         << " already meets the projected stopping threshold "
         << threshold
         << "; the sequential phase will likely stop immediately";
      out.advisory = os.str();
    }
  }
  return out;
}

double optimal_sample_size(double b, long p, double sigma2) {
  if (!std::isfinite(b) || b <= 0.0) {
    throw InvalidArgument("optimal_sample_size: b must be positive");
  }
  if (p < 1) {
    throw InvalidArgument("optimal_sample_size: p must be >= 1");
  }
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
    throw InvalidArgument(
        "optimal_sample_size: sigma2 must be finite and positive");
  }
  return static_cast<double>(p) * sigma2 / b;
}

double theoretical_risk(long n, long p, double sigma2) {
  if (n < 1) {
    throw InvalidArgument("theoretical_risk: n must be >= 1");
  }
  if (p < 1) {
    throw InvalidArgument("theoretical_risk: p must be >= 1");
  }
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
    throw InvalidArgument(
        "theoretical_risk: sigma2 must be finite and positive");
  }
  return static_cast<double>(p) * sigma2 / static_cast<double>(n);
}

long strict_floor(double u) {
  if (!std::isfinite(u)) {
    throw InvalidArgument("strict_floor: argument must be finite");
  }
  double f = std::floor(u);
  if (f == u) {
    f -= 1.0;
  }
  return static_cast<long>(f);
}

}  // namespace seqreg
