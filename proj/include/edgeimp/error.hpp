#pragma once

#include <stdexcept>
#include <string>

namespace edgeimp {

/// Bad or inconsistent input data (malformed files, precondition violations on data).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A delimited-text row that could not be parsed.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration, such as a column mapping that names no column.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgeimp
