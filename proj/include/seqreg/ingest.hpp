#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "seqreg/engine.hpp"
#include "seqreg/errors.hpp"

namespace seqreg {

// Per-column preprocessing applied as values stream in.
enum class ColumnTransform { identity, shifted_log };

// ln(v + 1); rejects v < 0 and non-finite v.
double shifted_log(double v);

struct SchemaColumn {
  std::string name;
  ColumnTransform transform = ColumnTransform::identity;

  bool operator==(const SchemaColumn&) const = default;
};

// Maps file columns onto a regression: which column is the response, which
// are numeric predictors (with optional transforms), which are 0/1 dummy
// indicators taken as-is, and whether to prepend an intercept.
struct DataSchema {
  SchemaColumn response;
  std::vector<SchemaColumn> predictors;
  std::vector<std::string> dummies;
  bool intercept = true;

  // Number of regression parameters this schema produces.
  long param_count() const;
};

// Checks name uniqueness and that the response is not also a predictor.
// Throws InvalidConfig.
void validate_schema(const DataSchema& schema);

// Streaming CSV reader over one file. Header row is required; fields are
// comma-separated with '.' decimals. Draw-by-draw it yields rows in file
// order; a short draw means the file is done. Parse problems surface as
// ParseError with the row, column, and offending token; a header that lacks
// a needed column (or repeats one) is a SchemaMismatch.
std::unique_ptr<ObservationSource> open_csv_source(
    const std::filesystem::path& path, const DataSchema& schema);

// Round-robin merge: one row from each member per cycle, in the order
// given. Exhausted as soon as the next member in rotation is dry.
std::unique_ptr<ObservationSource> interleave_sources(
    std::vector<std::unique_ptr<ObservationSource>> sources);

}  // namespace seqreg
