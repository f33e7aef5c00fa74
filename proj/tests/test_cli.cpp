#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seqreg/cli.hpp"
#include "seqreg/version.hpp"
#include "testutil.hpp"

using namespace seqreg;

namespace {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  Json j;
  in >> j;
  return j;
}

// Timestamps differ run to run; drop them before comparing reports.
Json without_timestamp(Json j) {
  j["provenance"].erase("timestamp");
  return j;
}

bool looks_like_utc_timestamp(const std::string& ts) {
  // 2024-06-01T12:34:56Z
  return ts.size() == 20 && ts[4] == '-' && ts[7] == '-' && ts[10] == 'T' &&
         ts[13] == ':' && ts[16] == ':' && ts.back() == 'Z';
}

}  // namespace

TEST_CASE("cmd_eta reports the constant and its bookkeeping") {
  EtaOptions opts;
  opts.k = 10;
  const Report report = cmd_eta(opts);

  CHECK(report.command == "eta");
  CHECK(report.config["k"] == 10);
  CHECK_FALSE(report.config.contains("rho"));
  CHECK(report.result["k"] == 10);
  CHECK(std::fabs(report.result["eta"].get<double>() -
                  3.9047368932367445) <= 1e-12);
  CHECK(report.result["terms_used"].get<long>() >= 1);
  CHECK(report.result["truncation_threshold"] == 1e-15);
  CHECK_FALSE(report.result.contains("projected_overshoot"));
  CHECK(report.certified);
  CHECK(report.warnings.empty());
  CHECK(report.provenance.tool == kToolName);
  CHECK(report.provenance.version == kToolVersion);
  CHECK(looks_like_utc_timestamp(report.provenance.timestamp));
}

TEST_CASE("cmd_eta scales the overshoot by rho when given") {
  EtaOptions opts;
  opts.k = 5;
  opts.rho = 0.8;
  const Report report = cmd_eta(opts);
  CHECK(report.config["rho"] == 0.8);
  CHECK(std::fabs(report.result["projected_overshoot"].get<double>() -
                  1.2476617009585076 / 0.8) <= 1e-12);

  opts.rho = 0.0;
  CHECK_THROWS_AS(cmd_eta(opts), InvalidConfig);
  opts.rho = 1.5;
  CHECK_THROWS_AS(cmd_eta(opts), InvalidConfig);
}

TEST_CASE("cmd_simulate echoes the design and summarizes the study") {
  SimulateOptions opts;
  opts.b = 0.4;
  opts.k = 5;
  opts.rho = 0.8;
  opts.m0 = 2;
  opts.replications = 40;
  opts.seed = 7;
  const Report report = cmd_simulate(opts);

  CHECK(report.command == "simulate");
  CHECK(report.config["b"] == 0.4);
  CHECK(report.config["k"] == 5);
  CHECK(report.config["rho"] == 0.8);
  CHECK(report.config["m0"] == 2);
  CHECK(report.config["p"] == 4);
  CHECK(report.config["m"] == 14);
  CHECK(report.config["error_sd"] == 2.0);
  CHECK(report.config["replications"] == 40);
  CHECK(report.config["seed"] == 7);
  CHECK(report.config["workers"] == 1);
  CHECK(report.config["beta_true"] ==
        Json(std::vector<double>{100.0, -4.0, 3.0, 2.0}));
  CHECK(report.config["predictors"].size() == 3);

  CHECK(report.result["n_star"] == 40.0);
  CHECK(report.result["r_star"] == 0.4);
  CHECK(report.result["replications"] == 40);
  CHECK(report.result["n_min"].get<long>() >= 18);
  CHECK(report.result["n_bar"].get<double>() > 30.0);
  CHECK(report.result["est_r_bar"].get<double>() > 0.0);
  CHECK(report.certified);
}

TEST_CASE("cmd_simulate is reproducible for a fixed seed") {
  SimulateOptions opts;
  opts.b = 0.4;
  opts.replications = 30;
  opts.seed = 7;
  const Report a = cmd_simulate(opts);
  const Report b = cmd_simulate(opts);
  CHECK(a.result == b.result);
  CHECK(a.config == b.config);
  CHECK(a.warnings == b.warnings);
}

TEST_CASE("cmd_simulate accepts a custom generating model") {
  SimulateOptions opts;
  opts.b = 0.5;
  opts.k = 2;
  opts.m0 = 2;
  opts.replications = 20;
  opts.error_sd = 1.0;
  opts.beta = std::vector<double>{1.0, 2.0};
  opts.predictor_means = std::vector<double>{0.0};
  opts.predictor_variances = std::vector<double>{1.0};
  const Report report = cmd_simulate(opts);
  CHECK(report.config["p"] == 2);
  CHECK(report.config["m"] == 6);  // 2*2 + 2
  CHECK(report.result["n_star"] == 4.0);  // 2*1/0.5
}

TEST_CASE("cmd_simulate validates the override shapes") {
  SimulateOptions opts;
  opts.replications = 5;
  opts.predictor_means = std::vector<double>{0.0, 1.0};
  CHECK_THROWS_AS(cmd_simulate(opts), InvalidConfig);  // variances missing

  SimulateOptions uneven;
  uneven.replications = 5;
  uneven.predictor_means = std::vector<double>{0.0};
  uneven.predictor_variances = std::vector<double>{1.0, 2.0};
  CHECK_THROWS_AS(cmd_simulate(uneven), InvalidConfig);

  SimulateOptions short_beta;
  short_beta.replications = 5;
  short_beta.beta = std::vector<double>{1.0};
  CHECK_THROWS_AS(cmd_simulate(short_beta), InvalidConfig);
}

TEST_CASE("cmd_simulate warns when the pilot covers the threshold") {
  SimulateOptions opts;
  opts.b = 10.0;  // threshold 0.8*4*4/10 = 1.28 <= m = 14
  opts.replications = 5;
  const Report report = cmd_simulate(opts);
  REQUIRE_FALSE(report.warnings.empty());
  CHECK(report.result["n_bar"] == 18.0);  // every run stops at the pilot
}

TEST_CASE("cmd_run fits a generated file and certifies the result") {
  SimulationDesign design = default_design(0.1, 5, 0.8, 2);
  const auto csv =
      testutil::write_design_csv("run_full.csv", design, 600, 2024);

  RunOptions opts;
  opts.data_paths = {csv.string()};
  opts.response = "y";
  opts.predictors = {"x1", "x2", "x3"};
  opts.b = 0.1;
  opts.k = 5;
  opts.rho = 0.8;
  opts.m0 = 2;
  const CommandOutcome outcome = cmd_run(opts);

  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.certified);
  CHECK(outcome.report.command == "run");
  CHECK(outcome.report.config["p"] == 4);
  CHECK(outcome.report.config["m"] == 14);
  CHECK(outcome.report.warnings.empty());

  const Json& result = outcome.report.result;
  const long n_final = result["n_final"].get<long>();
  CHECK(n_final >= 100);
  CHECK(n_final <= 260);
  CHECK(result["sequential_n"].get<long>() <= n_final);
  CHECK(result["s2"].get<double>() > 0.0);
  CHECK(result["estimated_risk"].get<double>() > 0.0);

  const Json& coefs = result["coefficients"];
  REQUIRE(coefs.size() == 4);
  CHECK(coefs[0]["name"] == "(intercept)");
  CHECK(coefs[1]["name"] == "x1");
  CHECK(coefs[2]["name"] == "x2");
  CHECK(coefs[3]["name"] == "x3");
  CHECK(std::fabs(coefs[0]["estimate"].get<double>() - 100.0) < 30.0);
  CHECK(std::fabs(coefs[1]["estimate"].get<double>() + 4.0) < 1.0);
  CHECK(std::fabs(coefs[2]["estimate"].get<double>() - 3.0) < 0.5);
  CHECK(std::fabs(coefs[3]["estimate"].get<double>() - 2.0) < 0.5);
  for (const Json& c : coefs) {
    CHECK(c["std_error"].get<double>() > 0.0);
  }
}

TEST_CASE("cmd_run labels transformed predictors in the coefficients") {
  std::string text = "y,x\n";
  for (int i = 1; i <= 8; ++i) {
    const double x = i;
    const double y = 3.0 * std::log1p(x) + 0.01 * (i % 3);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", y, x);
    text += buf;
  }
  const auto csv = testutil::write_file("run_log.csv", text);

  RunOptions opts;
  opts.data_paths = {csv.string()};
  opts.response = "y";
  opts.predictors = {"x"};
  opts.log_columns = {"x"};
  opts.b = 10.0;
  opts.k = 1;
  opts.m0 = 2;
  opts.rho = 0.8;
  const CommandOutcome outcome = cmd_run(opts);
  CHECK(outcome.exit_code == 0);
  const Json& coefs = outcome.report.result["coefficients"];
  REQUIRE(coefs.size() == 2);
  CHECK(coefs[0]["name"] == "(intercept)");
  CHECK(coefs[1]["name"] == "log1p(x)");
  CHECK(std::fabs(coefs[1]["estimate"].get<double>() - 3.0) < 0.2);
}

TEST_CASE("cmd_run rejects a log column that is not in the model") {
  RunOptions opts;
  opts.data_paths = {"whatever.csv"};
  opts.response = "y";
  opts.predictors = {"x"};
  opts.log_columns = {"z"};
  CHECK_THROWS_AS(cmd_run(opts), InvalidConfig);
}

TEST_CASE("cmd_run turns an exhausted source into an uncertified report") {
  const auto csv = testutil::write_file("run_short.csv", "y,x\n1,1\n2,2\n3,5\n");
  RunOptions opts;
  opts.data_paths = {csv.string()};
  opts.response = "y";
  opts.predictors = {"x"};
  opts.b = 0.1;
  opts.k = 1;
  opts.m0 = 2;  // m = 4 > 3 rows available
  opts.rho = 0.8;
  const CommandOutcome outcome = cmd_run(opts);

  CHECK(outcome.exit_code == 2);
  CHECK_FALSE(outcome.report.certified);
  REQUIRE_FALSE(outcome.report.warnings.empty());
  const Json& result = outcome.report.result;
  CHECK(result["stage"] == "pilot");
  CHECK(result["rows_absorbed"] == 3);
  CHECK(result["rows_needed"] == 4);
  CHECK(result["rows_obtained"] == 3);
  CHECK(result.contains("s2"));  // 3 rows > 2 params, so s2 exists
  CHECK_FALSE(result.contains("n_final"));
}

TEST_CASE("cmd_run interleaves several files into one sample") {
  // Split one generated stream across two files; together they cover the
  // required sample, separately they would not.
  SimulationDesign design = default_design(0.4, 5, 0.8, 2);
  const auto full = testutil::write_design_csv("interleave_full.csv", design,
                                               120, 99);
  std::ifstream in(full);
  std::string header;
  std::getline(in, header);
  std::string line;
  std::string even = header + "\n";
  std::string odd = header + "\n";
  bool flip = false;
  while (std::getline(in, line)) {
    (flip ? odd : even) += line + "\n";
    flip = !flip;
  }
  const auto pa = testutil::write_file("interleave_a.csv", even);
  const auto pb = testutil::write_file("interleave_b.csv", odd);

  RunOptions opts;
  opts.data_paths = {pa.string(), pb.string()};
  opts.response = "y";
  opts.predictors = {"x1", "x2", "x3"};
  opts.b = 0.4;
  opts.k = 5;
  opts.rho = 0.8;
  opts.m0 = 2;
  const CommandOutcome outcome = cmd_run(opts);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.certified);
  CHECK(outcome.report.result["n_final"].get<long>() >= 18);
}

TEST_CASE("reports survive a json round trip") {
  EtaOptions eta_opts;
  eta_opts.k = 3;
  eta_opts.rho = 0.5;
  const Report eta_report = cmd_eta(eta_opts);
  CHECK(report_from_json(to_json(eta_report)) == eta_report);

  SimulateOptions sim_opts;
  sim_opts.b = 0.4;
  sim_opts.replications = 10;
  const Report sim_report = cmd_simulate(sim_opts);
  CHECK(report_from_json(to_json(sim_report)) == sim_report);

  Json broken = to_json(eta_report);
  broken.erase("command");
  CHECK_THROWS_AS(report_from_json(broken), InvalidArgument);
  Json no_prov = to_json(eta_report);
  no_prov.erase("provenance");
  CHECK_THROWS_AS(report_from_json(no_prov), InvalidArgument);
}

TEST_CASE("csv projections keep the documented column order") {
  EtaOptions eta_opts;
  eta_opts.k = 5;
  eta_opts.rho = 0.8;
  const std::string eta_csv = to_csv(cmd_eta(eta_opts));
  std::istringstream eta_lines(eta_csv);
  std::string header, row, extra;
  std::getline(eta_lines, header);
  std::getline(eta_lines, row);
  CHECK(header == "k,eta,terms_used,truncation_threshold,projected_overshoot");
  CHECK_FALSE(std::getline(eta_lines, extra));
  CHECK(row.substr(0, 2) == "5,");

  // Without rho the trailing cell is empty rather than invented.
  EtaOptions bare;
  bare.k = 5;
  const std::string bare_csv = to_csv(cmd_eta(bare));
  std::istringstream bare_lines(bare_csv);
  std::getline(bare_lines, header);
  std::getline(bare_lines, row);
  CHECK(row.back() == ',');

  SimulateOptions sim_opts;
  sim_opts.b = 0.4;
  sim_opts.replications = 10;
  const std::string sim_csv = to_csv(cmd_simulate(sim_opts));
  std::istringstream sim_lines(sim_csv);
  std::getline(sim_lines, header);
  CHECK(header ==
        "b,n_star,n_bar,se_n_bar,ratio,diff,sigma_bar,se_sigma_bar,r_star,"
        "r_bar,se_r_bar,est_r_bar,se_est_r_bar");
  std::getline(sim_lines, row);
  // Full-precision formatting may print 0.4 as 0.40000000000000002.
  CHECK(std::stod(row.substr(0, row.find(','))) == 0.4);

  Report unknown;
  unknown.command = "mystery";
  CHECK_THROWS_AS(to_csv(unknown), InvalidArgument);
}

TEST_CASE("write_report emits json or csv to a chosen file") {
  EtaOptions eta_opts;
  eta_opts.k = 2;
  const Report report = cmd_eta(eta_opts);

  CommonOptions json_out;
  json_out.out = (testutil::scratch_dir() / "report.json").string();
  write_report(report, json_out);
  const Json parsed = load_json_file(*json_out.out);
  CHECK(parsed["command"] == "eta");
  CHECK(report_from_json(parsed) == report);

  CommonOptions csv_out;
  csv_out.format = ReportFormat::csv;
  csv_out.out = (testutil::scratch_dir() / "report.csv").string();
  write_report(report, csv_out);
  std::ifstream in(*csv_out.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,eta,terms_used,truncation_threshold,projected_overshoot");

  CommonOptions bad;
  bad.out = "/nonexistent-dir/report.json";
  CHECK_THROWS_AS(write_report(report, bad), FileError);
}

TEST_CASE("eta report matches the golden file") {
  EtaOptions opts;
  opts.k = 10;
  opts.rho = 0.8;
  const Report report = cmd_eta(opts);
  const Json golden =
      load_json_file(std::string(SEQREG_TEST_DATA_DIR) + "/eta_k10.json");
  CHECK(without_timestamp(to_json(report)) == without_timestamp(golden));
}

TEST_CASE("small simulation report matches the golden file") {
  SimulateOptions opts;
  opts.b = 0.4;
  opts.k = 5;
  opts.rho = 0.8;
  opts.m0 = 2;
  opts.replications = 50;
  opts.seed = 123;
  opts.workers = 1;
  const Report report = cmd_simulate(opts);
  const Json golden = load_json_file(std::string(SEQREG_TEST_DATA_DIR) +
                                     "/simulate_small.json");
  CHECK(without_timestamp(to_json(report)) == without_timestamp(golden));
}
