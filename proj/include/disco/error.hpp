#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace disco {

// Input violated a documented contract (bad label, out-of-bounds span,
// malformed file). The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line-oriented input file could not be parsed. `line` is 1-based.
class FormatError : public ValidationError {
 public:
  FormatError(std::string source, std::size_t line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace disco
