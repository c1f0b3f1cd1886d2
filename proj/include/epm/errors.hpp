#pragma once
// Error conventions: std::invalid_argument for usage/shape/config violations,
// std::domain_error for non-finite numeric input, std::logic_error for broken
// internal invariants, NonConvergenceError for iterative solves that run out
// of budget.  The CLI maps these to exit codes 1, 1, 3, 2.

#include <stdexcept>
#include <string>

namespace epm {

struct NonConvergenceError : std::runtime_error {
  double residual;
  long iterations;

  NonConvergenceError(const std::string& what, double residual_, long iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
};

}  // namespace epm
