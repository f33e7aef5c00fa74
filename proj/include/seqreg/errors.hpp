#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqreg {

// Common base so callers can catch everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration violates one of its invariants.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// A function argument is outside its domain (NaN, negative count, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A row's predictor vector has the wrong length for the accumulator.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// The normal equations are numerically singular.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// Not enough rows yet for the requested quantity.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// A value fails a domain check during transformation (e.g. log of a negative).
class InvalidValue : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or read.
class FileError : public Error {
 public:
  using Error::Error;
};

// A data file's header does not match the requested schema.
class SchemaMismatch : public Error {
 public:
  SchemaMismatch(std::string column, const std::string& what)
      : Error(what), column_(std::move(column)) {}

  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

// A data row could not be parsed; carries enough to locate the cell.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, std::string token,
             const std::string& what)
      : Error(what),
        row_(row),
        column_(std::move(column)),
        token_(std::move(token)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t row_;
  std::string column_;
  std::string token_;
};

// A replication inside a parallel study failed; carries which one.
class StudyError : public Error {
 public:
  StudyError(std::size_t replication, const std::string& what)
      : Error(what), replication_(replication) {}

  std::size_t replication() const { return replication_; }

 private:
  std::size_t replication_;
};

}  // namespace seqreg
