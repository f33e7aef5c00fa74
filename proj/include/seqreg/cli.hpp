#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqreg/montecarlo.hpp"
#include "seqreg/report.hpp"

namespace seqreg {

enum class ReportFormat { json, csv };

struct CommonOptions {
  std::optional<std::string> out;  // file path; stdout when absent
  ReportFormat format = ReportFormat::json;
};

struct EtaOptions {
  long k = 1;
  std::optional<double> rho;
  CommonOptions common;
};

// Defaults mirror the benchmark design.
struct SimulateOptions {
  double b = 0.1;
  long k = 5;
  double rho = 0.8;
  long m0 = 2;
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<double> error_sd;
  std::optional<std::vector<double>> beta;
  std::optional<std::vector<double>> predictor_means;
  std::optional<std::vector<double>> predictor_variances;
  CommonOptions common;
};

struct RunOptions {
  std::vector<std::string> data_paths;  // interleaved in the order given
  std::string response;
  std::vector<std::string> predictors;
  std::vector<std::string> log_columns;  // subset of the above to shifted-log
  std::vector<std::string> dummies;
  bool intercept = true;
  double b = 0.1;
  long k = 1;
  double rho = 0.8;
  long m0 = 2;
  std::optional<double> sigma2_hint;
  CommonOptions common;
};

struct CommandOutcome {
  Report report;
  int exit_code = 0;
};

Report cmd_eta(const EtaOptions& opts);
Report cmd_simulate(const SimulateOptions& opts);
CommandOutcome cmd_run(const RunOptions& opts);

// Serializes per opts.format and writes to opts.out or stdout.
void write_report(const Report& report, const CommonOptions& opts);

}  // namespace seqreg
