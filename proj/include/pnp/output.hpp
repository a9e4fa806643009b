#pragma once

/**
 * @file output.hpp
 * @brief CSV and JSON emission. All quantities are nondimensional; headers
 *        say so. Numbers are printed with 17 significant digits so repeated
 *        runs produce byte-identical files.
 */

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnp/config.hpp"
#include "pnp/experiments.hpp"
#include "pnp/timestepper.hpp"

namespace pnp::io {

inline std::string num(double v)
{
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

/// Columns t, dt, F_h, mass_l..., min_c_l..., rho_left, newton_iters.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
  auto out = open_out(path);
  const std::size_t m = traj.diagnostics.empty() ? 0 : traj.diagnostics.front().mass.size();
  out << "t[nondim],dt[nondim],F_h[nondim]";
  for (std::size_t l = 1; l <= m; ++l) out << ",mass_" << l << "[nondim]";
  for (std::size_t l = 1; l <= m; ++l) out << ",min_c_" << l << "[nondim]";
  out << ",rho_left[nondim],newton_iters[count]\n";
  for (const auto& d : traj.diagnostics) {
    out << num(d.t) << ',' << num(d.dt) << ',' << num(d.F_h);
    for (double v : d.mass) out << ',' << num(v);
    for (double v : d.min_c) out << ',' << num(v);
    out << ',' << num(d.net_charge_left) << ',' << d.newton_iters << '\n';
  }
}

/// Columns h, err_c1, order_c1, err_c2, order_c2, ..., err_psi, order_psi.
inline void write_error_table_csv(const std::filesystem::path& path, const ErrorTable& t)
{
  auto out = open_out(path);
  const std::size_t m = t.rows.empty() ? 0 : t.rows.front().err_c.size();
  out << "h[nondim],dt[nondim]";
  for (std::size_t l = 1; l <= m; ++l) out << ",err_c" << l << "[nondim],order_c" << l << "[1]";
  out << ",err_psi[nondim],order_psi[1]\n";
  for (const auto& r : t.rows) {
    out << num(r.h) << ',' << num(r.dt);
    for (std::size_t l = 0; l < m; ++l) out << ',' << num(r.err_c[l]) << ',' << num(r.order_c[l]);
    out << ',' << num(r.err_psi) << ',' << num(r.order_psi) << '\n';
  }
}

/// Flat field snapshot: i, j (1-based), x, y, value.
inline void write_snapshot_csv(const std::filesystem::path& path, const Grid2D& g,
                               std::span<const double> values)
{
  auto out = open_out(path);
  out << "i[index],j[index],x[nondim],y[nondim],value[nondim]\n";
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      out << i + 1 << ',' << j + 1 << ',' << num(g.x_center(i)) << ',' << num(g.y_center(j)) << ','
          << num(values[g.index(i, j)]) << '\n';
}

/// Iteration counts and state agreement; wall times go to a separate file
/// so this one stays reproducible.
inline void write_comparison_csv(const std::filesystem::path& path,
                                 const std::vector<ComparisonRow>& rows)
{
  auto out = open_out(path);
  out << "n[cells per side],dt[nondim],steps[count],newton_iters_per_step[count],"
         "fixed_point_iters_per_step[count],max_state_diff[nondim]\n";
  for (const auto& r : rows)
    out << r.n << ',' << num(r.dt) << ',' << r.steps << ',' << num(r.newton_mean_iters) << ','
        << num(r.fixed_point_mean_iters) << ',' << num(r.max_state_diff) << '\n';
}

inline void write_timing_csv(const std::filesystem::path& path,
                             const std::vector<ComparisonRow>& rows)
{
  auto out = open_out(path);
  out << "n[cells per side],newton_seconds[s],fixed_point_seconds[s]\n";
  for (const auto& r : rows)
    out << r.n << ',' << num(r.newton_seconds) << ',' << num(r.fixed_point_seconds) << '\n';
}

inline void write_config_json(const std::filesystem::path& path, const RunConfig& c)
{
  auto out = open_out(path);
  out << to_json(c).dump(2) << '\n';
}

}  // namespace pnp::io
