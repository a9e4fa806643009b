#pragma once

/**
 * @file experiments.hpp
 * @brief Drivers for the numerical experiments: manufactured-solution
 *        accuracy, closed-cell conservation/dissipation, adaptive stepping
 *        under a switching potential, AC charge dynamics, and the Newton
 *        versus fixed-point comparison.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <string>
#include <vector>

#include "pnp/config.hpp"
#include "pnp/diagnostics.hpp"
#include "pnp/mms.hpp"
#include "pnp/newton.hpp"
#include "pnp/timestepper.hpp"

namespace pnp {

/// dt implied by the config's dt rule for mesh width h.
inline double sweep_dt(const RunConfig& c, double h)
{
  if (c.dt_rule == "h2") return h * h;
  if (c.dt_rule == "h_over_10") return h / 10.0;
  return c.time.dt;
}

inline SimulationOptions simulation_options(const RunConfig& c)
{
  SimulationOptions so;
  so.solver = c.solver;
  so.checks = c.checks;
  so.charge_split = c.charge_split;
  return so;
}

// ---------------------------------------------------------------------------
// Manufactured-solution accuracy

struct ErrorRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  std::vector<double> err_c;  ///< per species
  double err_psi = 0.0;
  /// Orders against the previous row; NaN on the first row.
  std::vector<double> order_c;
  double order_psi = std::numeric_limits<double>::quiet_NaN();
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
};

/// Max-norm errors of a state against the manufactured solution at s.t.
inline ErrorRow mms_errors(const Grid2D& g, const PnpState& s)
{
  ErrorRow r;
  r.err_c.assign(s.c.size(), 0.0);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t k = g.index(i, j);
      const double x = g.x_center(i), y = g.y_center(j);
      const double ce = mms::concentration(s.t, x, y);
      for (std::size_t l = 0; l < s.c.size(); ++l)
        r.err_c[l] = std::max(r.err_c[l], std::abs(s.c[l][k] - ce));
      r.err_psi = std::max(r.err_psi, std::abs(s.psi[k] - mms::potential(s.t, x, y)));
    }
  return r;
}

inline double convergence_order(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

inline void fill_orders(ErrorTable& t)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto& row = t.rows[r];
    row.order_c.assign(row.err_c.size(), nan);
    row.order_psi = nan;
    if (r == 0) continue;
    const auto& prev = t.rows[r - 1];
    for (std::size_t l = 0; l < row.err_c.size(); ++l)
      row.order_c[l] = convergence_order(prev.err_c[l], row.err_c[l], prev.h, row.h);
    row.order_psi = convergence_order(prev.err_psi, row.err_psi, prev.h, row.h);
  }
}

/// One row per grid in c.grids, N x N cells, dt from the dt rule, run to t_end.
inline ErrorTable run_mms_accuracy(const RunConfig& c)
{
  ErrorTable table;
  for (int n : c.grids) {
    const PnpProblem p = build_problem(c, n, n);
    const double h = std::max((c.x1 - c.x0), (c.y1 - c.y0)) / n;
    TimeControls tc;
    tc.mode = StepMode::Uniform;
    tc.dt = sweep_dt(c, h);
    tc.t_end = c.time.t_end;
    StepSolver solver(p, c.newton);
    Trajectory traj;
    try {
      traj = run_simulation(solver, tc, simulation_options(c));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("grid " + std::to_string(n) + ": " + e.what(), e.best_iterate(),
                             e.history());
    }
    ErrorRow row = mms_errors(p.grid(), traj.final_state);
    row.n = n;
    row.h = h;
    row.dt = tc.dt;
    table.rows.push_back(std::move(row));
  }
  fill_orders(table);
  return table;
}

// ---------------------------------------------------------------------------
// Closed cell and adaptive switching

inline Trajectory run_closed_cell(const RunConfig& c, StepObserver observer = {})
{
  StepSolver solver(build_problem(c), c.newton);
  SimulationOptions so = simulation_options(c);
  so.observer = std::move(observer);
  return run_simulation(solver, c.time, so);
}

struct SwitchingResult {
  Trajectory adaptive;
  Trajectory uniform;
};

/// The configured (adaptive) run plus a uniform reference at uniform_dt.
inline SwitchingResult run_adaptive_switching(const RunConfig& c)
{
  StepSolver solver(build_problem(c), c.newton);
  const SimulationOptions so = simulation_options(c);
  TimeControls uni;
  uni.mode = StepMode::Uniform;
  uni.dt = c.uniform_dt > 0.0 ? c.uniform_dt : c.time.dt_min;
  uni.t_end = c.time.t_end;
  SwitchingResult r;
  r.adaptive = run_simulation(solver, c.time, so);
  r.uniform = run_simulation(solver, uni, so);
  return r;
}

// ---------------------------------------------------------------------------
// AC charge dynamics

struct Snapshot {
  double t = 0.0;
  PnpState state;
};

struct AcRun {
  double omega = 0.0;
  Trajectory trajectory;
  std::vector<Snapshot> snapshots;
};

/// One run per omega (plus an omega = 0 control when requested); the right
/// electrode potential must be a charge_then_sine field.
inline std::vector<AcRun> run_ac_dynamics(const RunConfig& c, bool parallel = false)
{
  if (c.v_right.type != "charge_then_sine")
    throw ConfigError("/potential/right: AC runs need a charge_then_sine field");
  std::vector<double> omegas = c.omegas;
  if (c.omega_zero_control) omegas.push_back(0.0);

  auto one = [&c](double omega) {
    RunConfig rc = c;
    rc.v_right.params["omega"] = omega;
    AcRun run;
    run.omega = omega;
    std::size_t next = 0;
    auto times = c.snapshot_times;
    std::sort(times.begin(), times.end());
    SimulationOptions so = simulation_options(rc);
    so.observer = [&](std::size_t, const PnpState& s, const StepDiagnostics&) {
      while (next < times.size() && s.t >= times[next] - 1e-12) {
        run.snapshots.push_back({times[next], s});
        ++next;
      }
    };
    StepSolver solver(build_problem(rc), rc.newton);
    run.trajectory = run_simulation(solver, rc.time, so);
    return run;
  };

  std::vector<AcRun> runs;
  if (parallel) {
    std::vector<std::future<AcRun>> jobs;
    for (double w : omegas) jobs.push_back(std::async(std::launch::async, one, w));
    for (auto& j : jobs) runs.push_back(j.get());
  } else {
    for (double w : omegas) runs.push_back(one(w));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// Newton versus fixed point

struct ComparisonRow {
  int n = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  double newton_mean_iters = 0.0;
  double fixed_point_mean_iters = 0.0;
  double newton_seconds = 0.0;
  double fixed_point_seconds = 0.0;
  /// Largest infinity-norm distance between the two solvers' states over all steps.
  double max_state_diff = 0.0;
  /// Smallest concentration either solver produced.
  double min_concentration = std::numeric_limits<double>::infinity();
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// Advances both solvers in lockstep with dt from the dt rule.
inline std::vector<ComparisonRow> run_solver_comparison(const RunConfig& c)
{
  using clock = std::chrono::steady_clock;
  std::vector<ComparisonRow> rows;
  for (int n : c.grids) {
    const PnpProblem p = build_problem(c, n, n);
    const double h = std::max((c.x1 - c.x0), (c.y1 - c.y0)) / n;
    StepSolver solver(p, c.newton);
    ComparisonRow row;
    row.n = n;
    row.dt = sweep_dt(c, h);
    PnpState sn = solver.initial_state(), sf = sn;
    std::size_t it_n = 0, it_f = 0;
    while (sn.t < c.time.t_end) {
      const double dt = clamp_to_end(row.dt, sn.t, c.time.t_end, 0.0);
      const double t_next = dt == c.time.t_end - sn.t ? c.time.t_end : sn.t + dt;
      auto t0 = clock::now();
      StepResult rn = solver.newton_step(sn, t_next, dt);
      auto t1 = clock::now();
      StepResult rf = solver.fixed_point_step(sf, t_next, dt);
      auto t2 = clock::now();
      row.newton_seconds += std::chrono::duration<double>(t1 - t0).count();
      row.fixed_point_seconds += std::chrono::duration<double>(t2 - t1).count();
      it_n += rn.iterations;
      it_f += rf.iterations;
      sn = {t_next, std::move(rn.psi), std::move(rn.c)};
      sf = {t_next, std::move(rf.psi), std::move(rf.c)};
      row.max_state_diff = std::max(row.max_state_diff, max_abs_diff(sn.psi, sf.psi));
      for (std::size_t l = 0; l < sn.c.size(); ++l) {
        row.max_state_diff = std::max(row.max_state_diff, max_abs_diff(sn.c[l], sf.c[l]));
        for (const auto* c : {&sn.c[l], &sf.c[l]})
          row.min_concentration =
              std::min(row.min_concentration, *std::min_element(c->begin(), c->end()));
      }
      ++row.steps;
    }
    if (row.steps > 0) {
      row.newton_mean_iters = double(it_n) / double(row.steps);
      row.fixed_point_mean_iters = double(it_f) / double(row.steps);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pnp
