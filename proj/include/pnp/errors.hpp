#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pnp {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver (linear or nonlinear) failed to reach its tolerance.
///
/// Carries the best iterate seen and a residual history so callers can report
/// how far the solve got.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> best_iterate = {},
                   std::vector<double> history = {})
      : std::runtime_error(what), best_iterate_(std::move(best_iterate)),
        history_(std::move(history))
  {
  }

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> best_iterate_;
  std::vector<double> history_;
};

/// BiCGSTAB recurrence broke down (rho or omega vanished).
class BreakdownError : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};

/// Zero pivot met during an incomplete factorization.
class FactorizationError : public std::runtime_error {
public:
  FactorizationError(const std::string& what, std::size_t row)
      : std::runtime_error(what), row_(row)
  {
  }
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

/// A structural guarantee of the scheme (mass, positivity, energy) was violated.
class InvariantViolation : public std::runtime_error {
public:
  InvariantViolation(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step)
  {
  }
  long step() const noexcept { return step_; }

private:
  long step_;
};

}  // namespace pnp
