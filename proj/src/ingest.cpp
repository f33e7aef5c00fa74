#include "seqreg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <utility>

namespace seqreg {

double shifted_log(double v) {
  if (!std::isfinite(v)) {
    throw InvalidValue("shifted_log: value must be finite");
  }
  if (v < 0.0) {
    throw InvalidValue("shifted_log: value must be >= 0, got " +
                       std::to_string(v));
  }
  return std::log1p(v);
}

long DataSchema::param_count() const {
  return (intercept ? 1 : 0) + static_cast<long>(predictors.size()) +
         static_cast<long>(dummies.size());
}

void validate_schema(const DataSchema& schema) {
  std::vector<std::string> names;
  names.push_back(schema.response.name);
  for (const SchemaColumn& c : schema.predictors) {
    names.push_back(c.name);
  }
  for (const std::string& d : schema.dummies) {
    names.push_back(d);
  }
  for (const std::string& name : names) {
    if (name.empty()) {
      throw InvalidConfig("schema: column names must be non-empty");
    }
  }
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw InvalidConfig("schema: column '" + *dup +
                        "' is referenced more than once");
  }
  if (schema.param_count() < 1) {
    throw InvalidConfig("schema: model has no parameters");
  }
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

class CsvSource final : public ObservationSource {
 public:
  CsvSource(const std::filesystem::path& path, const DataSchema& schema)
      : in_(path), path_(path.string()), schema_(schema) {
    validate_schema(schema_);
    if (!in_) {
      throw FileError("cannot open '" + path_ + "'");
    }
    std::string header;
    if (!std::getline(in_, header)) {
      throw FileError("'" + path_ + "' is empty (no header row)");
    }
    ++line_;

    std::vector<std::string> cells = split_fields(header);
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_map<std::string, int> counts;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string name = trim(cells[i]);
      index.emplace(name, i);  // first occurrence wins; dups checked below
      ++counts[name];
    }
    field_count_ = cells.size();

    const auto locate = [&](const std::string& name) {
      if (counts[name] > 1) {
        throw SchemaMismatch(name, "'" + path_ + "': column '" + name +
                                       "' appears more than once in the "
                                       "header");
      }
      const auto it = index.find(name);
      if (it == index.end()) {
        throw SchemaMismatch(
            name, "'" + path_ + "': column '" + name + "' not found");
      }
      return it->second;
    };

    response_col_ = locate(schema_.response.name);
    for (const SchemaColumn& c : schema_.predictors) {
      predictor_cols_.push_back(locate(c.name));
    }
    for (const std::string& d : schema_.dummies) {
      dummy_cols_.push_back(locate(d));
    }
  }

  std::vector<Observation> draw(std::size_t count) override {
    std::vector<Observation> out;
    out.reserve(count);
    std::string line;
    while (out.size() < count && !exhausted_) {
      if (!std::getline(in_, line)) {
        exhausted_ = true;
        break;
      }
      ++line_;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (trim(line).empty()) {
        continue;
      }
      out.push_back(parse_row(line));
    }
    return out;
  }

 private:
  Observation parse_row(const std::string& line) const {
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != field_count_) {
      throw ParseError(line_, "", "",
                       "'" + path_ + "' line " + std::to_string(line_) +
                           ": expected " + std::to_string(field_count_) +
                           " fields, got " + std::to_string(fields.size()));
    }

    Observation row;
    row.x.reserve(static_cast<std::size_t>(schema_.param_count()));
    if (schema_.intercept) {
      row.x.push_back(1.0);
    }
    row.y = cell(fields, response_col_, schema_.response.name,
                 schema_.response.transform);
    for (std::size_t i = 0; i < predictor_cols_.size(); ++i) {
      row.x.push_back(cell(fields, predictor_cols_[i],
                           schema_.predictors[i].name,
                           schema_.predictors[i].transform));
    }
    for (std::size_t i = 0; i < dummy_cols_.size(); ++i) {
      row.x.push_back(cell(fields, dummy_cols_[i], schema_.dummies[i],
                           ColumnTransform::identity));
    }
    return row;
  }

  double cell(const std::vector<std::string>& fields, std::size_t col,
              const std::string& name, ColumnTransform transform) const {
    const std::string token = trim(fields[col]);
    if (token.empty()) {
      throw ParseError(line_, name, fields[col],
                       "'" + path_ + "' line " + std::to_string(line_) +
                           ", column '" + name + "': empty field");
    }
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw ParseError(line_, name, token,
                       "'" + path_ + "' line " + std::to_string(line_) +
                           ", column '" + name + "': '" + token +
                           "' is not a finite number");
    }
    if (transform == ColumnTransform::shifted_log) {
      try {
        return shifted_log(value);
      } catch (const InvalidValue& e) {
        throw ParseError(line_, name, token,
                         "'" + path_ + "' line " + std::to_string(line_) +
                             ", column '" + name + "': " + e.what());
      }
    }
    return value;
  }

  std::ifstream in_;
  std::string path_;
  DataSchema schema_;
  std::size_t field_count_ = 0;
  std::size_t response_col_ = 0;
  std::vector<std::size_t> predictor_cols_;
  std::vector<std::size_t> dummy_cols_;
  std::size_t line_ = 0;
  bool exhausted_ = false;
};

class InterleaveSource final : public ObservationSource {
 public:
  explicit InterleaveSource(
      std::vector<std::unique_ptr<ObservationSource>> sources)
      : sources_(std::move(sources)) {
    if (sources_.empty()) {
      throw InvalidArgument("interleave_sources: need at least one source");
    }
    for (const auto& s : sources_) {
      if (!s) {
        throw InvalidArgument("interleave_sources: null source");
      }
    }
  }

  std::vector<Observation> draw(std::size_t count) override {
    std::vector<Observation> out;
    out.reserve(count);
    while (out.size() < count && !exhausted_) {
      std::vector<Observation> one = sources_[next_]->draw(1);
      if (one.empty()) {
        exhausted_ = true;
        break;
      }
      out.push_back(std::move(one.front()));
      next_ = (next_ + 1) % sources_.size();
    }
    return out;
  }

 private:
  std::vector<std::unique_ptr<ObservationSource>> sources_;
  std::size_t next_ = 0;
  bool exhausted_ = false;
};

}  // namespace

std::unique_ptr<ObservationSource> open_csv_source(
    const std::filesystem::path& path, const DataSchema& schema) {
  return std::make_unique<CsvSource>(path, schema);
}

std::unique_ptr<ObservationSource> interleave_sources(
    std::vector<std::unique_ptr<ObservationSource>> sources) {
  return std::make_unique<InterleaveSource>(std::move(sources));
}

}  // namespace seqreg
