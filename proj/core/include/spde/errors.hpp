#pragma once

#include <stdexcept>
#include <string>

namespace spde {

// Argument outside the mathematical domain of an operation (j = 0, t < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent configuration: non-nested grids, dealiasing grid too small,
// parameter outside an admissible range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not meet its own convergence criterion.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A non-finite value appeared where the algorithm guarantees finiteness.
class OverflowError : public std::runtime_error {
 public:
  OverflowError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Violated internal invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace spde
