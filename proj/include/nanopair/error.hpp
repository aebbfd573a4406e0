#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nanopair {

// Bad input: violated precondition, malformed value, inconsistent arguments.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query outside the domain a model is defined on.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Iterative method stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Least-squares fit that has no admissible solution (no peak, degenerate data).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; offset is a byte position for time-tag files and a
// 1-based line number for dispersion tables.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace nanopair
