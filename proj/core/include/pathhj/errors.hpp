#pragma once

#include <stdexcept>
#include <string>

namespace pathhj {

/// Invalid arguments or inconsistent inputs (bad sizes, off-grid times, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to deliver a result within its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual, double time)
      : std::runtime_error(what), residual_(residual), time_(time) {}

  double residual() const { return residual_; }
  double time() const { return time_; }

 private:
  double residual_;
  double time_;
};

/// Exhaustive enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pathhj
