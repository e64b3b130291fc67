#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evtrust {

// Argument outside the mathematical domain of a function (x <= 0 for
// log_gamma, x outside (0,1) for a density, negative evidence, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Violated precondition on otherwise well-formed arguments.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative method stopped before reaching its tolerance. Carries the
// best estimate available at the point of failure.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

// Malformed input data. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace evtrust
