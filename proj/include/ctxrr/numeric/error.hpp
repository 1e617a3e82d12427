#pragma once

#include <stdexcept>
#include <string>

namespace ctxrr {

/// Malformed input data: corpus files, model containers, configs.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure with a 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A required on-disk artifact (model, corpus file) is not present.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical contract violated (NaN input, non-finite gradient, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctxrr
