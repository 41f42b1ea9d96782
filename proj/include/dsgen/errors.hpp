#pragma once

#include <stdexcept>
#include <string>

namespace dsgen {

// Malformed input documents (space definitions, CSV files, expressions).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  explicit ParseError(const std::string& message)
      : std::runtime_error(message), line_(0) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Violated data-level preconditions (bad sizes, missing labels, ...).
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsgen
