#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "seqreg/cli.hpp"
#include "seqreg/version.hpp"

namespace {

void add_common(CLI::App* cmd, seqreg::CommonOptions& common) {
  cmd->add_option("-o,--out", common.out, "Write the report to this file");
  cmd->add_option("--format", common.format, "Report format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, seqreg::ReportFormat>{
              {"json", seqreg::ReportFormat::json},
              {"csv", seqreg::ReportFormat::csv}},
          CLI::ignore_case))
      ->default_str("json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential sample-size selection for linear regression"};
  app.set_version_flag("--version", std::string(seqreg::kToolName) + " " +
                                        seqreg::kToolVersion);
  app.require_subcommand(1);

  seqreg::EtaOptions eta_opts;
  CLI::App* eta_cmd = app.add_subcommand(
      "eta", "Asymptotic overshoot constant for a batch size");
  eta_cmd->add_option("-k,--k", eta_opts.k, "Batch size")
      ->required()
      ->check(CLI::PositiveNumber);
  eta_cmd->add_option("--rho", eta_opts.rho,
                      "Also report the projected overshoot eta(k)/rho");
  add_common(eta_cmd, eta_opts.common);

  seqreg::SimulateOptions sim_opts;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo study of the stopping procedure");
  sim_cmd->add_option("-b,--b", sim_opts.b, "Cost per unit risk")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("-k,--k", sim_opts.k, "Batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--rho", sim_opts.rho, "Sequential sampling fraction")
      ->capture_default_str();
  sim_cmd->add_option("--m0", sim_opts.m0, "Pilot batches beyond p")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd
      ->add_option("-R,--replications", sim_opts.replications,
                   "Number of independent replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_opts.seed, "Study seed")
      ->capture_default_str();
  sim_cmd
      ->add_option("-j,--workers", sim_opts.workers,
                   "Worker threads (results are identical for any count)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--error-sd", sim_opts.error_sd,
                      "Error standard deviation (default 2)");
  sim_cmd->add_option("--beta", sim_opts.beta,
                      "True coefficients, comma separated, intercept first")
      ->delimiter(',');
  sim_cmd
      ->add_option("--predictor-means", sim_opts.predictor_means,
                   "Predictor means, comma separated")
      ->delimiter(',');
  sim_cmd
      ->add_option("--predictor-variances", sim_opts.predictor_variances,
                   "Predictor variances, comma separated")
      ->delimiter(',');
  add_common(sim_cmd, sim_opts.common);

  seqreg::RunOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Run the stopping procedure on CSV data");
  run_cmd
      ->add_option("--data", run_opts.data_paths,
                   "CSV file; repeat to interleave several in the order "
                   "given")
      ->required();
  run_cmd->add_option("--response", run_opts.response, "Response column")
      ->required();
  run_cmd
      ->add_option("--predictors", run_opts.predictors,
                   "Predictor columns, comma separated")
      ->delimiter(',');
  run_cmd
      ->add_option("--log", run_opts.log_columns,
                   "Columns (response or predictors) to transform as "
                   "ln(value + 1)")
      ->delimiter(',');
  run_cmd
      ->add_option("--dummies", run_opts.dummies,
                   "Indicator columns used as-is")
      ->delimiter(',');
  run_cmd->add_flag("--no-intercept",
                    [&run_opts](std::int64_t) { run_opts.intercept = false; },
                    "Fit without an intercept");
  run_cmd->add_option("-b,--b", run_opts.b, "Cost per unit risk")
      ->required()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("-k,--k", run_opts.k, "Batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--rho", run_opts.rho, "Sequential sampling fraction")
      ->capture_default_str();
  run_cmd->add_option("--m0", run_opts.m0, "Pilot batches beyond p")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--sigma2-hint", run_opts.sigma2_hint,
                      "Rough error variance, used only to warn when the "
                      "pilot would already exceed the projected threshold");
  add_common(run_cmd, run_opts.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*eta_cmd) {
      seqreg::write_report(seqreg::cmd_eta(eta_opts), eta_opts.common);
      return 0;
    }
    if (*sim_cmd) {
      seqreg::write_report(seqreg::cmd_simulate(sim_opts), sim_opts.common);
      return 0;
    }
    const seqreg::CommandOutcome outcome = seqreg::cmd_run(run_opts);
    seqreg::write_report(outcome.report, run_opts.common);
    return outcome.exit_code;
  } catch (const seqreg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
