#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnp/diagnostics.hpp"
#include "pnp/errors.hpp"
#include "pnp/newton.hpp"
#include "pnp/problem.hpp"

namespace pnp {

enum class StepMode { Uniform, Adaptive };

struct TimeControls {
  StepMode mode = StepMode::Uniform;
  double dt = 1e-3;
  double dt_min = 1e-3;
  double dt_max = 1e-3;
  /// Adaptivity gain; 0 switches adaptivity off.
  double alpha = 0.0;
  double t_end = 0.0;

  void validate() const
  {
    if (!(t_end >= 0.0)) throw std::invalid_argument("TimeControls: t_end must be nonnegative");
    if (mode == StepMode::Uniform && !(dt > 0.0))
      throw std::invalid_argument("TimeControls: dt must be positive");
    if (mode == StepMode::Adaptive) {
      if (!(dt_min > 0.0) || !(dt_min <= dt_max))
        throw std::invalid_argument("TimeControls: need 0 < dt_min <= dt_max");
      if (!(alpha >= 0.0)) throw std::invalid_argument("TimeControls: alpha must be nonnegative");
    }
  }
};

/// Shortens dt so the step lands on t_end, absorbing remainders that would
/// leave a sliver step behind.
inline double clamp_to_end(double dt, double t_now, double t_end, double dt_floor)
{
  const double left = t_end - t_now;
  if (dt >= left || left - dt < 1e-9 * dt) return left;
  if (left - dt < dt_floor) return left - dt_floor >= dt_floor ? left - dt_floor : left;
  return dt;
}

/// dt_next = max(dt_min, dt_max / sqrt(1 + alpha F'^2)), F' = (F_curr - F_prev)/dt_prev.
inline double adaptive_dt(double f_prev, double f_curr, double dt_prev, const TimeControls& tc)
{
  if (!(dt_prev > 0.0)) throw std::invalid_argument("adaptive_dt: dt_prev must be positive");
  const double fp = (f_curr - f_prev) / dt_prev;
  return std::max(tc.dt_min, tc.dt_max / std::sqrt(1.0 + tc.alpha * fp * fp));
}

/// As above, then clamped so that t_now + dt does not pass t_end.
inline double adaptive_dt(double f_prev, double f_curr, double dt_prev, const TimeControls& tc,
                          double t_now)
{
  return clamp_to_end(adaptive_dt(f_prev, f_curr, dt_prev, tc), t_now, tc.t_end, tc.dt_min);
}

/// Runtime assertions made after every accepted step.
struct InvariantChecks {
  bool mass = false;
  double mass_rel_tol = 1e-10;
  bool energy = false;
  double energy_tol = 1e-10;
};

struct Trajectory {
  std::vector<StepDiagnostics> diagnostics;  ///< index 0 is the initial state
  PnpState final_state;
  std::size_t steps = 0;
  std::vector<std::string> retry_log;
};

using StepObserver = std::function<void(std::size_t step, const PnpState&, const StepDiagnostics&)>;

struct SimulationOptions {
  SolverKind solver = SolverKind::Newton;
  InvariantChecks checks;
  /// x coordinate separating the "left" half for the net charge.
  double charge_split = 0.0;
  /// Failed steps are retried with dt halved while dt stays at or above this.
  double retry_dt_floor = 0.0;
  StepObserver observer;
};

inline Trajectory run_simulation(const StepSolver& solver, const TimeControls& tc,
                                 const SimulationOptions& so = {})
{
  tc.validate();
  const PnpProblem& p = solver.problem();
  Trajectory traj;
  PnpState state = solver.initial_state();
  traj.diagnostics.push_back(diagnose(p, state, 0.0, 0, 0, so.charge_split));
  if (so.observer) so.observer(0, state, traj.diagnostics.back());

  const bool adaptive = tc.mode == StepMode::Adaptive;
  const double dt_floor = adaptive ? tc.dt_min : 0.0;
  const double retry_floor =
      so.retry_dt_floor > 0.0 ? so.retry_dt_floor : (adaptive ? tc.dt_min : tc.dt / 64.0);
  double dt = clamp_to_end(adaptive ? tc.dt_min : tc.dt, 0.0, tc.t_end, dt_floor);

  while (state.t < tc.t_end) {
    const std::size_t n = traj.steps + 1;
    StepResult res;
    double t_next = 0.0;
    for (;;) {
      t_next = (dt == tc.t_end - state.t) ? tc.t_end : state.t + dt;
      try {
        res = solver.step(so.solver, state, t_next, dt);
        break;
      } catch (const InvariantViolation& e) {
        throw InvariantViolation(std::string(e.what()) + " at step " + std::to_string(n),
                                 long(n));
      } catch (const ConvergenceError& e) {
        const double half = 0.5 * dt;
        if (half < retry_floor * (1.0 - 1e-12)) {
          throw ConvergenceError("step " + std::to_string(n) + " at t=" +
                                     std::to_string(state.t) + " failed: " + e.what(),
                                 e.best_iterate(), e.history());
        }
        std::ostringstream log;
        log << "step " << n << " t=" << state.t << ": " << e.what() << "; retry with dt=" << half;
        traj.retry_log.push_back(log.str());
        dt = half;
      }
    }

    PnpState next{t_next, std::move(res.psi), std::move(res.c)};
    StepDiagnostics d = diagnose(p, next, dt, res.iterations, res.linear_iterations,
                                 so.charge_split);
    const StepDiagnostics& prev = traj.diagnostics.back();
    if (so.checks.mass)
      for (std::size_t l = 0; l < d.mass.size(); ++l) {
        const double m0 = traj.diagnostics.front().mass[l];
        if (std::abs(d.mass[l] - m0) > so.checks.mass_rel_tol * std::abs(m0)) {
          std::ostringstream msg;
          msg << "mass of species " << l << " drifted to " << d.mass[l] << " from " << m0
              << " at step " << n;
          throw InvariantViolation(msg.str(), long(n));
        }
      }
    if (so.checks.energy &&
        d.F_h > prev.F_h + so.checks.energy_tol * std::max(1.0, std::abs(prev.F_h))) {
      std::ostringstream msg;
      msg << "free energy increased from " << prev.F_h << " to " << d.F_h << " at step " << n;
      throw InvariantViolation(msg.str(), long(n));
    }

    state = std::move(next);
    traj.steps = n;
    traj.diagnostics.push_back(d);
    if (so.observer) so.observer(n, state, traj.diagnostics.back());
    if (state.t >= tc.t_end) break;

    const double dt_prev = dt;
    dt = adaptive ? adaptive_dt(prev.F_h, d.F_h, dt_prev, tc, state.t)
                  : clamp_to_end(tc.dt, state.t, tc.t_end, 0.0);
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace pnp
