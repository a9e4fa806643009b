#pragma once

/**
 * @file poisson.hpp
 * @brief Cell-centred discretization of -kappa Laplace(psi) = rho.
 *
 * Dirichlet data V on the left/right faces enters through a ghost value
 * psi_0 = 2V - psi_1; surface charge sigma = kappa dpsi/dn on the bottom/top
 * faces enters through the right-hand side only. The assembled matrix L has
 * rows scaled by 1/(hx_i hy_j), so that R = P L is symmetric.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/grid.hpp"
#include "pnp/linalg/bicgstab.hpp"
#include "pnp/linalg/ilu0.hpp"
#include "pnp/linalg/sparse_matrix.hpp"
#include "pnp/stencil.hpp"

namespace pnp {

using Vector = std::vector<double>;

struct PoissonProblem {
  Grid2D grid;
  double kappa = 1.0;
  Field v_left = Field::zero();
  Field v_right = Field::zero();
  Field sigma_bottom = Field::zero();
  Field sigma_top = Field::zero();
  Field rho_f = Field::zero();

  /// True when no boundary datum or fixed charge depends on time.
  bool static_data() const
  {
    return !(v_left.time_dependent || v_right.time_dependent || sigma_bottom.time_dependent ||
             sigma_top.time_dependent || rho_f.time_dependent);
  }
};

namespace detail {

inline void check_kappa(const PoissonProblem& p)
{
  if (!(p.kappa > 0.0)) throw std::invalid_argument("PoissonProblem: kappa must be positive");
}

}  // namespace detail

/// R = P L, assembled face by face so that it is exactly symmetric.
inline linalg::SparseMatrix assemble_symmetrized_poisson_matrix(const PoissonProblem& p)
{
  detail::check_kappa(p);
  const Grid2D& g = p.grid;
  FivePointStencil st(g);
  auto& val = st.matrix.values();
  using S = FivePointStencil;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t k = g.index(i, j);
      if (i + 1 < g.nx()) {
        const double w = p.kappa * g.hy(j) / g.hx_face(i + 1);
        const std::size_t e = g.index(i + 1, j);
        val[st.slots[k][S::Center]] += w;
        val[st.slots[e][S::Center]] += w;
        val[st.slots[k][S::East]] -= w;
        val[st.slots[e][S::West]] -= w;
      }
      if (j + 1 < g.ny()) {
        const double w = p.kappa * g.hx(i) / g.hy_face(j + 1);
        val[st.slots[k][S::Center]] += w;
        val[st.slots[k + 1][S::Center]] += w;
        val[st.slots[k][S::North]] -= w;
        val[st.slots[k + 1][S::South]] -= w;
      }
      // Dirichlet ghost elimination doubles the half-cell coupling.
      if (i == 0) val[st.slots[k][S::Center]] += 2.0 * p.kappa * g.hy(j) / g.hx_face(0);
      if (i + 1 == g.nx())
        val[st.slots[k][S::Center]] += 2.0 * p.kappa * g.hy(j) / g.hx_face(g.nx());
    }
  return st.matrix;
}

/// The coefficient matrix L of L psi = sum_l q^l c^l + rho_f + b.
inline linalg::SparseMatrix assemble_poisson_matrix(const PoissonProblem& p)
{
  linalg::SparseMatrix r = assemble_symmetrized_poisson_matrix(p);
  const auto& area = p.grid.cell_areas();
  const auto& off = r.row_offsets();
  auto& val = r.values();
  for (std::size_t row = 0; row < r.rows(); ++row)
    for (std::size_t q = off[row]; q < off[row + 1]; ++q) val[q] /= area[row];
  return r;
}

/// Boundary contribution b(t) from Dirichlet and surface-charge data,
/// evaluated at face midpoints.
inline Vector boundary_lift(const PoissonProblem& p, double t)
{
  const Grid2D& g = p.grid;
  Vector b(g.size(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    const double y = g.y_center(j);
    const std::size_t kl = g.index(0, j), kr = g.index(g.nx() - 1, j);
    b[kl] += 2.0 * p.kappa * p.v_left(t, g.x_lo(), y) / (g.hx(0) * g.hx_face(0));
    b[kr] += 2.0 * p.kappa * p.v_right(t, g.x_hi(), y) / (g.hx(g.nx() - 1) * g.hx_face(g.nx()));
  }
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.x_center(i);
    b[g.index(i, 0)] += p.sigma_bottom(t, x, g.y_lo()) / g.hy(0);
    b[g.index(i, g.ny() - 1)] += p.sigma_top(t, x, g.y_hi()) / g.hy(g.ny() - 1);
  }
  return b;
}

/// Fixed charge rho_f(t) at cell centres.
inline Vector fixed_charge(const PoissonProblem& p, double t)
{
  const Grid2D& g = p.grid;
  Vector rho(g.size());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) rho[g.index(i, j)] = p.rho_f(t, g.x_center(i), g.y_center(j));
  return rho;
}

/// charge + rho_f(t) + b(t).
inline Vector assemble_poisson_rhs(const PoissonProblem& p, std::span<const double> charge,
                                   double t)
{
  if (charge.size() != p.grid.size())
    throw std::invalid_argument("assemble_poisson_rhs: charge vector has wrong length");
  Vector rhs = boundary_lift(p, t);
  const Vector rho = fixed_charge(p, t);
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += charge[k] + rho[k];
  return rhs;
}

/// Assembled L with its ILU(0) factors; L is built once per grid.
class PoissonSolver {
public:
  explicit PoissonSolver(PoissonProblem problem, linalg::BicgstabOptions opts = {})
      : problem_(std::move(problem)), matrix_(assemble_poisson_matrix(problem_)), ilu_(matrix_),
        opts_(opts)
  {
  }

  const PoissonProblem& problem() const noexcept { return problem_; }
  const linalg::SparseMatrix& matrix() const noexcept { return matrix_; }
  const linalg::Ilu0& preconditioner() const noexcept { return ilu_; }
  const linalg::BicgstabOptions& options() const noexcept { return opts_; }

  /// Solves L psi = rhs; psi holds the initial guess on entry.
  linalg::SolveReport solve_rhs(std::span<const double> rhs, std::span<double> psi) const
  {
    return linalg::bicgstab(matrix_, rhs, psi, ilu_, opts_);
  }

  /// psi solving L psi = charge + rho_f(t) + b(t).
  Vector solve(std::span<const double> charge, double t, std::span<const double> guess = {}) const
  {
    const Vector rhs = assemble_poisson_rhs(problem_, charge, t);
    Vector psi(rhs.size(), 0.0);
    if (guess.size() == psi.size()) std::copy(guess.begin(), guess.end(), psi.begin());
    solve_rhs(rhs, psi);
    return psi;
  }

private:
  PoissonProblem problem_;
  linalg::SparseMatrix matrix_;
  linalg::Ilu0 ilu_;
  linalg::BicgstabOptions opts_;
};

inline Vector solve_poisson(const PoissonProblem& p, std::span<const double> charge, double t,
                            const linalg::BicgstabOptions& opts = {})
{
  return PoissonSolver(p, opts).solve(charge, t);
}

}  // namespace pnp
