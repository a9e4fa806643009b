#pragma once

/**
 * @file nernst_planck.hpp
 * @brief Slotboom-form Nernst-Planck discretization with harmonic-mean
 *        face exponentials and the implicit per-species step.
 *
 * Each interior face between cells a and b carries the flux
 *   hface * e^{-S_half} (c_b e^{S_b} - c_a e^{S_a}) / h_half
 * where e^{-S_half} is the harmonic mean of e^{-S_a} and e^{-S_b}. Multiplying
 * out, the coefficient of c_a is 2/(1 + e^{S_b - S_a}), which never
 * overflows. Boundary faces carry zero flux.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pnp/errors.hpp"
#include "pnp/grid.hpp"
#include "pnp/linalg/bicgstab.hpp"
#include "pnp/linalg/ilu0.hpp"
#include "pnp/linalg/sparse_matrix.hpp"
#include "pnp/stencil.hpp"

namespace pnp {

using Vector = std::vector<double>;

/// Harmonic mean of e^{-Sa} and e^{-Sb}: 2 e^{-Sa} e^{-Sb} / (e^{-Sa} + e^{-Sb}).
inline double harmonic_mean_exp(double sa, double sb)
{
  if (!std::isfinite(sa) || !std::isfinite(sb))
    throw std::domain_error("harmonic_mean_exp: non-finite argument");
  // 2 / (e^{Sa} + e^{Sb}) with the larger exponent factored out.
  const double m = std::max(sa, sb);
  return 2.0 * std::exp(-m) / (std::exp(sa - m) + std::exp(sb - m));
}

/// e^{-S_half} e^{S_own} = 2 / (1 + e^{S_other - S_own}).
inline double slotboom_coefficient(double s_own, double s_other)
{
  const double d = s_other - s_own;
  if (d > 0.0) {
    const double e = std::exp(-d);
    return 2.0 * e / (1.0 + e);
  }
  return 2.0 / (1.0 + std::exp(d));
}

/// Slotboom difference across x-face f (0..nx) in row j; zero on boundary faces.
inline double np_flux_x(std::span<const double> c, std::span<const double> s, const Grid2D& g,
                        int f, int j)
{
  if (f <= 0 || f >= g.nx()) return 0.0;
  const std::size_t a = g.index(f - 1, j), b = g.index(f, j);
  return (c[b] * std::exp(s[b]) - c[a] * std::exp(s[a])) / g.hx_face(f);
}

/// Slotboom difference across y-face f (0..ny) in column i; zero on boundary faces.
inline double np_flux_y(std::span<const double> c, std::span<const double> s, const Grid2D& g,
                        int i, int f)
{
  if (f <= 0 || f >= g.ny()) return 0.0;
  const std::size_t a = g.index(i, f - 1), b = g.index(i, f);
  return (c[b] * std::exp(s[b]) - c[a] * std::exp(s[a])) / g.hy_face(f);
}

/// A^l c^{n+1} = P c^n (+ dt P f) for one species.
struct NPSystem {
  linalg::SparseMatrix matrix;
  Vector mass;  ///< diagonal of P
  double dt = 0.0;
};

/// Builds A = P - dt * (flux divergence) on a cached five-point pattern.
class NpAssembler {
public:
  explicit NpAssembler(const Grid2D& grid) : grid_(grid), stencil_(grid) {}

  const Grid2D& grid() const noexcept { return grid_; }
  const FivePointStencil& stencil() const noexcept { return stencil_; }

  linalg::SparseMatrix assemble(std::span<const double> psi, double valence, double dt) const
  {
    const Grid2D& g = grid_;
    if (psi.size() != g.size())
      throw std::invalid_argument("assemble_np_system: psi has wrong length");
    if (!(dt > 0.0)) throw std::invalid_argument("assemble_np_system: dt must be positive");
    for (double v : psi)
      if (!std::isfinite(v))
        throw std::domain_error("assemble_np_system: non-finite potential entry");

    linalg::SparseMatrix a = stencil_.matrix;
    auto& val = a.values();
    const auto& slots = stencil_.slots;
    const auto& area = g.cell_areas();
    using S = FivePointStencil;
    for (std::size_t k = 0; k < g.size(); ++k) val[slots[k][S::Center]] = area[k];

    auto couple = [&](std::size_t ka, std::size_t kb, S::Slot to_b, S::Slot to_a, double w) {
      const double sa = valence * psi[ka], sb = valence * psi[kb];
      const double ba = w * slotboom_coefficient(sa, sb);
      const double bb = w * slotboom_coefficient(sb, sa);
      val[slots[ka][S::Center]] += ba;
      val[slots[ka][to_b]] -= bb;
      val[slots[kb][S::Center]] += bb;
      val[slots[kb][to_a]] -= ba;
    };
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        const std::size_t k = g.index(i, j);
        if (i + 1 < g.nx())
          couple(k, g.index(i + 1, j), S::East, S::West, dt * g.hy(j) / g.hx_face(i + 1));
        if (j + 1 < g.ny()) couple(k, k + 1, S::North, S::South, dt * g.hx(i) / g.hy_face(j + 1));
      }
    return a;
  }

private:
  Grid2D grid_;
  FivePointStencil stencil_;
};

inline NPSystem assemble_np_system(const Grid2D& grid, std::span<const double> psi,
                                   double valence, double dt)
{
  return {NpAssembler(grid).assemble(psi, valence, dt), grid.cell_areas(), dt};
}

/// Right-hand side P c_old + dt P source.
inline Vector np_rhs(std::span<const double> mass, std::span<const double> c_old, double dt,
                     std::span<const double> source = {})
{
  Vector rhs(c_old.size());
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    rhs[k] = mass[k] * c_old[k];
    if (!source.empty()) rhs[k] += dt * mass[k] * source[k];
  }
  return rhs;
}

/// Entries below this are treated as a positivity violation rather than
/// round-off.
inline constexpr double positivity_floor = -1e-13;

inline void check_nonnegative(std::span<const double> c, const char* who)
{
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] < positivity_floor || !std::isfinite(c[k])) {
      std::ostringstream msg;
      msg << who << ": concentration " << c[k] << " at cell " << k << " violates positivity";
      throw InvariantViolation(msg.str());
    }
}

/// Solves A c_new = P c_old + dt P source by ILU(0)-preconditioned BiCGSTAB.
inline Vector step_concentration(const NPSystem& sys, std::span<const double> c_old,
                                 std::span<const double> source = {},
                                 linalg::BicgstabOptions opts = {1e-13})
{
  if (c_old.size() != sys.matrix.rows())
    throw std::invalid_argument("step_concentration: c_old has wrong length");
  const Vector rhs = np_rhs(sys.mass, c_old, sys.dt, source);
  Vector c(c_old.begin(), c_old.end());
  linalg::bicgstab(sys.matrix, rhs, c, linalg::Ilu0(sys.matrix), opts);
  check_nonnegative(c, "step_concentration");
  return c;
}

}  // namespace pnp
