#include "seqreg/report.hpp"

#include <ctime>
#include <sstream>

#include "seqreg/version.hpp"

namespace seqreg {

std::string current_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const Report& report) {
  return Json{
      {"command", report.command},
      {"config", report.config},
      {"result", report.result},
      {"provenance",
       {{"tool", report.provenance.tool},
        {"version", report.provenance.version},
        {"timestamp", report.provenance.timestamp}}},
      {"certified", report.certified},
      {"warnings", report.warnings},
  };
}

Report report_from_json(const Json& j) {
  try {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.result = j.at("result");
    const Json& prov = j.at("provenance");
    r.provenance.tool = prov.at("tool").get<std::string>();
    r.provenance.version = prov.at("version").get<std::string>();
    r.provenance.timestamp = prov.at("timestamp").get<std::string>();
    r.certified = j.at("certified").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed report: ") + e.what());
  }
}

namespace {

std::string csv_number(const Json& v) {
  if (v.is_null()) {
    return "";
  }
  std::ostringstream os;
  os.precision(17);
  if (v.is_number_integer()) {
    os << v.get<long long>();
  } else if (v.is_number()) {
    os << v.get<double>();
  } else if (v.is_boolean()) {
    os << (v.get<bool>() ? "true" : "false");
  } else {
    os << v.dump();
  }
  return os.str();
}

std::string csv_table(const std::vector<std::string>& columns,
                      const Json& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    os << (i ? "," : "") << columns[i];
  }
  os << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Json v = values.contains(columns[i]) ? values[columns[i]] : Json();
    os << (i ? "," : "") << csv_number(v);
  }
  os << "\n";
  return os.str();
}

}  // namespace

std::string to_csv(const Report& report) {
  if (report.command == "eta") {
    return csv_table({"k", "eta", "terms_used", "truncation_threshold",
                      "projected_overshoot"},
                     report.result);
  }
  if (report.command == "simulate") {
    Json flat = report.result;
    flat["b"] = report.config.contains("b") ? report.config["b"] : Json();
    return csv_table({"b", "n_star", "n_bar", "se_n_bar", "ratio", "diff",
                      "sigma_bar", "se_sigma_bar", "r_star", "r_bar",
                      "se_r_bar", "est_r_bar", "se_est_r_bar"},
                     flat);
  }
  if (report.command == "run") {
    Json flat = report.result;
    flat["certified"] = report.certified;
    return csv_table({"t_steps", "sequential_n", "n_projected", "n_final",
                      "s2", "certified"},
                     flat);
  }
  throw InvalidArgument("no tabular projection for command '" +
                        report.command + "'");
}

Json eta_payload(const EtaValue& value, std::optional<double> rho) {
  Json j{
      {"k", value.k},
      {"eta", value.value},
      {"terms_used", value.terms_used},
      {"truncation_threshold", value.truncation_threshold},
  };
  if (rho) {
    j["rho"] = *rho;
    j["projected_overshoot"] = value.value / *rho;
  }
  return j;
}

Json summary_payload(const ReplicationSummary& s) {
  return Json{
      {"n_star", s.n_star},
      {"n_bar", s.n_bar},
      {"se_n_bar", s.se_n},
      {"ratio", s.ratio},
      {"diff", s.diff},
      {"sigma_bar", s.sigma_bar},
      {"se_sigma_bar", s.se_sigma},
      {"r_star", s.r_star},
      {"r_bar", s.r_bar},
      {"se_r_bar", s.se_r},
      {"est_r_bar", s.est_r_bar},
      {"se_est_r_bar", s.se_est_r},
      {"replications", s.replications},
      {"n_min", s.n_min},
      {"n_max", s.n_max},
  };
}

Json stopping_payload(const StoppingResult& result,
                      const std::vector<std::string>& coefficient_names) {
  const FitSolution& sol = result.fit.solve();
  const std::vector<double> se = result.fit.coefficient_std_errors();
  Json coefs = Json::array();
  for (std::size_t i = 0; i < sol.beta.size(); ++i) {
    coefs.push_back(Json{
        {"name", i < coefficient_names.size() ? coefficient_names[i]
                                              : "x" + std::to_string(i)},
        {"estimate", sol.beta[i]},
        {"std_error", se[i]},
    });
  }
  return Json{
      {"t_steps", result.t_steps},
      {"sequential_n", result.sequential_n},
      {"n_projected", result.n_projected},
      {"n_final", result.n_final},
      {"s2", sol.s2},
      {"estimated_risk", static_cast<double>(result.fit.p()) * sol.s2 /
                             static_cast<double>(result.n_final)},
      {"coefficients", coefs},
  };
}

Json partial_payload(const SourceExhausted& err) {
  const PartialRun& partial = err.partial();
  const char* stage = "pilot";
  if (partial.stage == RunStage::sequential) {
    stage = "sequential";
  } else if (partial.stage == RunStage::topup) {
    stage = "topup";
  }
  Json j{
      {"stage", stage},
      {"rows_absorbed", partial.rows_absorbed},
      {"rows_needed", err.rows_needed()},
      {"rows_obtained", err.rows_obtained()},
  };
  if (partial.t_steps) {
    j["t_steps"] = *partial.t_steps;
  }
  if (partial.n_projected) {
    j["n_projected"] = *partial.n_projected;
  }
  if (partial.n_final) {
    j["n_final"] = *partial.n_final;
  }
  if (partial.fit.n() > partial.fit.p()) {
    try {
      j["s2"] = partial.fit.solve().s2;
    } catch (const RankDeficient&) {
      // leave it out; the partial fit is singular
    }
  }
  return j;
}

}  // namespace seqreg
