#pragma once

#include <stdexcept>
#include <string>

namespace netrct {

/// Raised when inputs violate a documented precondition.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Watts-Strogatz generation could not produce a connected graph.
class generation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form steady state requested outside the stable region.
class stability_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative solver did not converge within its budget.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unregularized dynamics produced a non-finite value at `step()`.
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(int step)
      : std::runtime_error("content production diverged at step " +
                           std::to_string(step)),
        step_(step) {}

  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace netrct
