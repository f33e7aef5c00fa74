#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "seqreg/chisq.hpp"
#include "seqreg/engine.hpp"
#include "seqreg/montecarlo.hpp"

namespace seqreg {

using Json = nlohmann::json;

// Who produced a report and when (ISO-8601 UTC).
struct Provenance {
  std::string tool;
  std::string version;
  std::string timestamp;

  bool operator==(const Provenance&) const = default;
};

// The envelope every command emits: what was run, with which configuration,
// what came out, and whether the run completed as specified.
struct Report {
  std::string command;
  Json config;
  Json result;
  Provenance provenance;
  bool certified = true;
  std::vector<std::string> warnings;

  bool operator==(const Report&) const = default;
};

std::string current_timestamp_utc();

Json to_json(const Report& report);
Report report_from_json(const Json& j);

// Flat tabular projection of the result payload. Lossy by design: only the
// headline numbers, one row per report.
std::string to_csv(const Report& report);

// Result payload builders for the three commands. coefficient_names labels
// the fitted coefficients in file order (intercept first when present).
Json eta_payload(const EtaValue& value, std::optional<double> rho);
Json summary_payload(const ReplicationSummary& summary);
Json stopping_payload(const StoppingResult& result,
                      const std::vector<std::string>& coefficient_names);
Json partial_payload(const SourceExhausted& err);

}  // namespace seqreg
