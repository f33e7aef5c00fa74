#include "seqreg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "seqreg/chisq.hpp"
#include "seqreg/ingest.hpp"
#include "seqreg/version.hpp"

namespace seqreg {

namespace {

Provenance make_provenance() {
  return Provenance{kToolName, kToolVersion, current_timestamp_utc()};
}

Json design_config(const SimulationDesign& d, unsigned workers) {
  Json predictors = Json::array();
  for (const PredictorSpec& ps : d.predictors) {
    predictors.push_back(Json{{"mean", ps.mean}, {"variance", ps.variance}});
  }
  return Json{
      {"b", d.cfg.b},
      {"k", d.cfg.k},
      {"rho", d.cfg.rho},
      {"m0", d.cfg.m0},
      {"p", d.cfg.p},
      {"m", d.cfg.m},
      {"error_sd", d.error_sd},
      {"beta_true", d.beta_true},
      {"intercept", d.intercept},
      {"predictors", predictors},
      {"replications", d.replications},
      {"seed", d.seed},
      {"workers", workers},
  };
}

}  // namespace

Report cmd_eta(const EtaOptions& opts) {
  const EtaValue value = eta(opts.k);
  Report report;
  report.command = "eta";
  report.config = Json{{"k", opts.k}};
  if (opts.rho) {
    if (!(*opts.rho > 0.0) || *opts.rho > 1.0) {
      throw InvalidConfig("rho must be in (0, 1], got " +
                          std::to_string(*opts.rho));
    }
    report.config["rho"] = *opts.rho;
  }
  report.result = eta_payload(value, opts.rho);
  report.provenance = make_provenance();
  return report;
}

Report cmd_simulate(const SimulateOptions& opts) {
  SimulationDesign design = default_design(opts.b, opts.k, opts.rho, opts.m0);
  design.replications = opts.replications;
  design.seed = opts.seed;
  if (opts.error_sd) {
    design.error_sd = *opts.error_sd;
  }
  if (opts.beta) {
    design.beta_true = *opts.beta;
  }
  if (opts.predictor_means || opts.predictor_variances) {
    if (!opts.predictor_means || !opts.predictor_variances ||
        opts.predictor_means->size() != opts.predictor_variances->size()) {
      throw InvalidConfig(
          "predictor means and variances must both be given, with equal "
          "lengths");
    }
    design.predictors.clear();
    for (std::size_t i = 0; i < opts.predictor_means->size(); ++i) {
      design.predictors.push_back(
          {(*opts.predictor_means)[i], (*opts.predictor_variances)[i]});
    }
  }
  design.cfg.p =
      (design.intercept ? 1 : 0) + static_cast<long>(design.predictors.size());
  design.cfg.m = 0;
  design = validate_design(design);

  Report report;
  report.command = "simulate";
  report.config = design_config(design, opts.workers);
  const ConfigValidation check =
      validate_config(design.cfg, design.error_sd * design.error_sd);
  if (check.advisory) {
    report.warnings.push_back(*check.advisory);
    std::cerr << "warning: " << *check.advisory << "\n";
  }

  const ReplicationSummary summary = run_study(design, opts.workers);
  for (const std::string& w : summary.warnings) {
    report.warnings.push_back(w);
  }
  report.result = summary_payload(summary);
  report.provenance = make_provenance();
  return report;
}

CommandOutcome cmd_run(const RunOptions& opts) {
  if (opts.data_paths.empty()) {
    throw InvalidConfig("at least one data file is required");
  }
  if (opts.response.empty()) {
    throw InvalidConfig("a response column is required");
  }

  const auto is_logged = [&](const std::string& name) {
    return std::find(opts.log_columns.begin(), opts.log_columns.end(),
                     name) != opts.log_columns.end();
  };
  for (const std::string& lc : opts.log_columns) {
    const bool known =
        lc == opts.response ||
        std::find(opts.predictors.begin(), opts.predictors.end(), lc) !=
            opts.predictors.end();
    if (!known) {
      throw InvalidConfig("log column '" + lc +
                          "' is neither the response nor a predictor");
    }
  }

  DataSchema schema;
  schema.response = {opts.response, is_logged(opts.response)
                                        ? ColumnTransform::shifted_log
                                        : ColumnTransform::identity};
  for (const std::string& name : opts.predictors) {
    schema.predictors.push_back({name, is_logged(name)
                                           ? ColumnTransform::shifted_log
                                           : ColumnTransform::identity});
  }
  schema.dummies = opts.dummies;
  schema.intercept = opts.intercept;
  validate_schema(schema);

  ProcedureConfig cfg;
  cfg.rho = opts.rho;
  cfg.k = opts.k;
  cfg.m0 = opts.m0;
  cfg.p = schema.param_count();
  cfg.b = opts.b;
  const ConfigValidation check = validate_config(cfg, opts.sigma2_hint);
  cfg = check.config;

  std::vector<std::string> names;
  if (schema.intercept) {
    names.push_back("(intercept)");
  }
  for (const SchemaColumn& c : schema.predictors) {
    names.push_back(c.transform == ColumnTransform::shifted_log
                        ? "log1p(" + c.name + ")"
                        : c.name);
  }
  for (const std::string& d : schema.dummies) {
    names.push_back(d);
  }

  Report report;
  report.command = "run";
  report.config = Json{
      {"data", opts.data_paths},
      {"response", opts.response},
      {"predictors", opts.predictors},
      {"log_columns", opts.log_columns},
      {"dummies", opts.dummies},
      {"intercept", opts.intercept},
      {"b", cfg.b},
      {"k", cfg.k},
      {"rho", cfg.rho},
      {"m0", cfg.m0},
      {"p", cfg.p},
      {"m", cfg.m},
  };
  if (opts.sigma2_hint) {
    report.config["sigma2_hint"] = *opts.sigma2_hint;
  }
  if (check.advisory) {
    report.warnings.push_back(*check.advisory);
    std::cerr << "warning: " << *check.advisory << "\n";
  }
  report.provenance = make_provenance();

  std::unique_ptr<ObservationSource> source;
  if (opts.data_paths.size() == 1) {
    source = open_csv_source(opts.data_paths.front(), schema);
  } else {
    std::vector<std::unique_ptr<ObservationSource>> members;
    members.reserve(opts.data_paths.size());
    for (const std::string& path : opts.data_paths) {
      members.push_back(open_csv_source(path, schema));
    }
    source = interleave_sources(std::move(members));
  }

  try {
    const StoppingResult result = run_procedure(cfg, *source);
    report.result = stopping_payload(result, names);
    report.certified = true;
    return {std::move(report), 0};
  } catch (const SourceExhausted& e) {
    report.result = partial_payload(e);
    report.certified = false;
    report.warnings.push_back(e.what());
    std::cerr << "warning: " << e.what() << "\n";
    return {std::move(report), 2};
  }
}

void write_report(const Report& report, const CommonOptions& opts) {
  std::string text;
  if (opts.format == ReportFormat::json) {
    text = to_json(report).dump(2);
    text.push_back('\n');
  } else {
    text = to_csv(report);
  }
  if (opts.out) {
    std::ofstream out(*opts.out);
    if (!out) {
      throw FileError("cannot write '" + *opts.out + "'");
    }
    out << text;
  } else {
    std::cout << text;
  }
}

}  // namespace seqreg
