#pragma once

/**
 * @file newton.hpp
 * @brief One backward-Euler step of the coupled system, solved either by
 *        Newton's method in the potential alone or by Gummel-style fixed
 *        point iteration.
 *
 * Eliminating the concentrations, c^l(u) = A^l(u)^{-1} r^l, leaves
 *   R(u) = L u - sum_l q^l A^l(u)^{-1} r^l - rho_f - b = 0,
 * with r^l = P c^{l,n} (+ dt P f^l). Its Jacobian is
 *   W(u) = L + sum_l (q^l)^2 A^l(u)^{-1} K(mu^l, u),   mu^l = A^l(u)^{-1} r^l,
 * and is only ever applied, never formed.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnp/errors.hpp"
#include "pnp/linalg/bicgstab.hpp"
#include "pnp/linalg/dense.hpp"
#include "pnp/linalg/ilu0.hpp"
#include "pnp/linalg/linear_operator.hpp"
#include "pnp/linalg/sparse_matrix.hpp"
#include "pnp/nernst_planck.hpp"
#include "pnp/poisson.hpp"
#include "pnp/problem.hpp"
#include "pnp/stencil.hpp"

namespace pnp {

/// e^D / (1 + e^D)^2 with D = s_neighbor - s_center; symmetric in D, at most 1/4.
inline double e_operator(double s_center, double s_neighbor)
{
  const double e = std::exp(-std::abs(s_neighbor - s_center));
  return e / ((1.0 + e) * (1.0 + e));
}

/// K(mu, u): (dA/du . v) mu = q K v, assembled face by face on a cached pattern.
inline linalg::SparseMatrix assemble_K(const FivePointStencil& st, const Grid2D& g,
                                       std::span<const double> mu, std::span<const double> u,
                                       double valence, double dt)
{
  if (mu.size() != g.size() || u.size() != g.size())
    throw std::invalid_argument("assemble_K: vector length does not match grid");
  linalg::SparseMatrix k = st.matrix;
  auto& val = k.values();
  using S = FivePointStencil;
  auto couple = [&](std::size_t a, std::size_t b, S::Slot to_b, S::Slot to_a, double coef) {
    const double w =
        2.0 * dt * coef * e_operator(valence * u[a], valence * u[b]) * (mu[a] + mu[b]);
    val[st.slots[a][S::Center]] += w;
    val[st.slots[b][S::Center]] += w;
    val[st.slots[a][to_b]] -= w;
    val[st.slots[b][to_a]] -= w;
  };
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t a = g.index(i, j);
      if (i + 1 < g.nx()) couple(a, g.index(i + 1, j), S::East, S::West, g.hy(j) / g.hx_face(i + 1));
      if (j + 1 < g.ny()) couple(a, a + 1, S::North, S::South, g.hx(i) / g.hy_face(j + 1));
    }
  return k;
}

inline linalg::SparseMatrix assemble_K(std::span<const double> mu, std::span<const double> u,
                                       double valence, const Grid2D& grid, double dt)
{
  return assemble_K(FivePointStencil(grid), grid, mu, u, valence, dt);
}

enum class SolverKind { Newton, FixedPoint };

struct NewtonOptions {
  /// Infinity-norm tolerance on the potential update.
  double tol = 1e-10;
  int max_newton = 25;
  int max_fixed_point = 1000;
  /// Relative tolerance of A^l solves inside R and W, and of the W solve.
  double inner_rel_tol = 1e-12;
  /// Relative tolerance of the final concentration solves.
  double concentration_rel_tol = 1e-13;
};

/// Everything W(u) needs, computed once per Newton iterate.
struct NewtonWorkspace {
  Vector u;
  double dt = 0.0;
  std::vector<linalg::SparseMatrix> A;
  std::vector<linalg::Ilu0> ilu;
  std::vector<Vector> mu;
  std::vector<linalg::SparseMatrix> K;
  Vector residual;
  std::size_t linear_iterations = 0;
};

struct StepResult {
  Vector psi;
  std::vector<Vector> c;
  int iterations = 0;
  std::size_t linear_iterations = 0;
  /// Infinity norm of each potential update.
  std::vector<double> history;
};

/// Step solver for a fixed problem; the Poisson matrix and its ILU(0) are
/// built once.
class StepSolver {
public:
  explicit StepSolver(PnpProblem problem, NewtonOptions opts = {})
      : problem_((problem.validate(), std::move(problem))),
        poisson_(problem_.poisson, {opts.inner_rel_tol}), np_(problem_.grid()),
        stencil_(problem_.grid()), opts_(opts)
  {
  }

  const PnpProblem& problem() const noexcept { return problem_; }
  const Grid2D& grid() const noexcept { return problem_.grid(); }
  const PoissonSolver& poisson() const noexcept { return poisson_; }
  const NpAssembler& np_assembler() const noexcept { return np_; }
  const NewtonOptions& options() const noexcept { return opts_; }

  /// c^0 sampled from the species' initial fields, psi^0 from a Poisson solve.
  PnpState initial_state() const
  {
    PnpState s;
    s.t = 0.0;
    for (const auto& sp : problem_.species) s.c.push_back(sample(sp.initial, grid(), 0.0));
    for (const auto& c : s.c) check_nonnegative(c, "initial_state");
    s.psi = poisson_.solve(ionic_charge(problem_, s.c), 0.0);
    return s;
  }

  /// r^l = P c^{l,n} + dt P f^l(t_next).
  Vector species_rhs(const PnpState& prev, std::size_t l, double t_next, double dt) const
  {
    const auto& sp = problem_.species.at(l);
    if (!sp.has_source) return np_rhs(grid().cell_areas(), prev.c[l], dt);
    const Vector f = sample(sp.source, grid(), t_next);
    return np_rhs(grid().cell_areas(), prev.c[l], dt, f);
  }

  NewtonWorkspace linearize(std::span<const double> u, const PnpState& prev, double t_next,
                            double dt) const
  {
    const std::size_t n = grid().size();
    if (u.size() != n) throw std::invalid_argument("linearize: potential has wrong length");
    NewtonWorkspace ws;
    ws.u.assign(u.begin(), u.end());
    ws.dt = dt;
    Vector charge(n, 0.0);
    for (std::size_t l = 0; l < problem_.n_species(); ++l) {
      const double q = problem_.species[l].valence;
      ws.A.push_back(np_.assemble(u, q, dt));
      ws.ilu.emplace_back(ws.A.back());
      const Vector r = species_rhs(prev, l, t_next, dt);
      Vector mu(prev.c[l]);
      ws.linear_iterations += species_solve(l, ws.A.back(), ws.ilu.back(), r, mu,
                                            opts_.inner_rel_tol);
      for (std::size_t k = 0; k < n; ++k) charge[k] += q * mu[k];
      ws.K.push_back(assemble_K(stencil_, grid(), mu, u, q, dt));
      ws.mu.push_back(std::move(mu));
    }
    const Vector rhs = assemble_poisson_rhs(problem_.poisson, charge, t_next);
    ws.residual = poisson_.matrix() * u;
    for (std::size_t k = 0; k < n; ++k) ws.residual[k] -= rhs[k];
    return ws;
  }

  Vector residual(std::span<const double> u, const PnpState& prev, double t_next, double dt) const
  {
    return linearize(u, prev, t_next, dt).residual;
  }

  /// W v = L v + sum_l q^2 A^{-1} K v.
  void apply_W(const NewtonWorkspace& ws, std::span<const double> v, std::span<double> out,
               std::size_t* linear_iterations = nullptr) const
  {
    const std::size_t n = grid().size();
    poisson_.matrix().apply(v, out);
    Vector kv(n), y(n);
    for (std::size_t l = 0; l < problem_.n_species(); ++l) {
      const double q = problem_.species[l].valence;
      if (q == 0.0) continue;
      ws.K[l].apply(v, kv);
      std::fill(y.begin(), y.end(), 0.0);
      const std::size_t its = species_solve(l, ws.A[l], ws.ilu[l], kv, y, opts_.inner_rel_tol);
      if (linear_iterations) *linear_iterations += its;
      for (std::size_t k = 0; k < n; ++k) out[k] += q * q * y[k];
    }
  }

  Vector apply_W(const NewtonWorkspace& ws, std::span<const double> v) const
  {
    Vector out(v.size());
    apply_W(ws, v, out);
    return out;
  }

  StepResult newton_step(const PnpState& prev, double t_next, double dt) const
  {
    check_step(prev, dt);
    const std::size_t n = grid().size();
    StepResult res;
    Vector u = prev.psi;
    bool converged = false;
    try {
      for (int k = 1; k <= opts_.max_newton; ++k) {
        const NewtonWorkspace ws = linearize(u, prev, t_next, dt);
        res.linear_iterations += ws.linear_iterations;
        Vector rhs(n), du(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -ws.residual[i];
        std::size_t inner = 0;
        linalg::FunctionOperator w(n, [&](std::span<const double> x, std::span<double> y) {
          apply_W(ws, x, y, &inner);
        });
        const auto rep =
            linalg::bicgstab(w, rhs, du, poisson_.preconditioner(), {opts_.inner_rel_tol});
        res.linear_iterations += rep.iterations + inner;
        double dmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          u[i] += du[i];
          dmax = std::max(dmax, std::abs(du[i]));
        }
        res.iterations = k;
        res.history.push_back(dmax);
        if (!std::isfinite(dmax)) break;
        if (dmax < opts_.tol) {
          converged = true;
          break;
        }
      }
    } catch (const std::domain_error& e) {
      throw ConvergenceError(std::string("newton: iterate left the domain: ") + e.what(), u,
                             res.history);
    }
    if (!converged)
      throw ConvergenceError("newton: no convergence in " + std::to_string(res.iterations) +
                                 " iterations",
                             u, res.history);
    res.psi = std::move(u);
    finish(prev, t_next, dt, res);
    return res;
  }

  /// Alternates a Poisson solve with the current concentrations and NP solves
  /// with the new potential until the potential stops changing. One iteration
  /// is one NP sweep plus the Poisson solve that follows it.
  StepResult fixed_point_step(const PnpState& prev, double t_next, double dt) const
  {
    check_step(prev, dt);
    const std::size_t n = grid().size();
    StepResult res;
    std::vector<Vector> c = prev.c;
    auto poisson_solve = [&](Vector& u) {
      const Vector rhs =
          assemble_poisson_rhs(problem_.poisson, ionic_charge(problem_, c), t_next);
      res.linear_iterations += poisson_.solve_rhs(rhs, u).iterations;
    };
    Vector u = prev.psi;
    poisson_solve(u);
    bool converged = false;
    for (int k = 1; k <= opts_.max_fixed_point; ++k) {
      for (std::size_t l = 0; l < problem_.n_species(); ++l) {
        const auto a = np_.assemble(u, problem_.species[l].valence, dt);
        res.linear_iterations += species_solve(l, a, linalg::Ilu0(a),
                                               species_rhs(prev, l, t_next, dt), c[l],
                                               opts_.inner_rel_tol);
      }
      Vector next(u);
      poisson_solve(next);
      double dmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(next[i] - u[i]));
      u = std::move(next);
      res.iterations = k;
      res.history.push_back(dmax);
      if (!std::isfinite(dmax)) break;
      if (dmax < opts_.tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw ConvergenceError("fixed point: no convergence in " +
                                 std::to_string(res.iterations) + " iterations",
                             u, res.history);
    res.psi = std::move(u);
    finish(prev, t_next, dt, res);
    return res;
  }

  StepResult step(SolverKind kind, const PnpState& prev, double t_next, double dt) const
  {
    return kind == SolverKind::Newton ? newton_step(prev, t_next, dt)
                                      : fixed_point_step(prev, t_next, dt);
  }

private:
  void check_step(const PnpState& prev, double dt) const
  {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    if (prev.c.size() != problem_.n_species() || prev.psi.size() != grid().size())
      throw std::invalid_argument("step: state does not match problem");
  }

  std::size_t species_solve(std::size_t l, const linalg::SparseMatrix& a, const linalg::Ilu0& ilu,
                            std::span<const double> b, std::span<double> x, double tol) const
  {
    try {
      return linalg::bicgstab(a, b, x, ilu, {tol}).iterations;
    } catch (const BreakdownError& e) {
      throw BreakdownError("species " + std::to_string(l) + ": " + e.what(), e.best_iterate(),
                           e.history());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("species " + std::to_string(l) + ": " + e.what(), e.best_iterate(),
                             e.history());
    }
  }

  /// c^{l,n+1} = A^l(psi^{n+1})^{-1} r^l at the tight concentration tolerance.
  void finish(const PnpState& prev, double t_next, double dt, StepResult& res) const
  {
    res.c.clear();
    for (std::size_t l = 0; l < problem_.n_species(); ++l) {
      const auto a = np_.assemble(res.psi, problem_.species[l].valence, dt);
      Vector c(prev.c[l]);
      res.linear_iterations += species_solve(l, a, linalg::Ilu0(a),
                                             species_rhs(prev, l, t_next, dt), c,
                                             opts_.concentration_rel_tol);
      check_nonnegative(c, "step");
      res.c.push_back(std::move(c));
    }
  }

  PnpProblem problem_;
  PoissonSolver poisson_;
  NpAssembler np_;
  FivePointStencil stencil_;
  NewtonOptions opts_;
};

/// Sufficient step-size bound for invertibility of W and the associated
/// estimates, from gamma = 1^T R^{-1} with R = P L.
struct WInvertibilityBound {
  std::size_t index_star = 0;
  double gamma_star = 0.0;
  double area_star = 0.0;
  /// hy_M p*/(hx_m^2 hy_m) + hx_M p*/(hy_m^2 hx_m)
  double geometric = 0.0;
  /// sum_l (q^l)^2 ||mu^l||_inf
  double mu_weight = 0.0;
  /// 4/hx_m^2 + 4/hy_m^2 scaled by kappa
  double l_norm_bound = 0.0;
  /// [hy_M/(hy_m hx_m^2) + hx_M/(hx_m hy_m^2)]
  double k_geometric = 0.0;
  double dt_max = 0.0;

  /// gamma* p* = ||L^{-1}||_1.
  double l_inverse_norm() const { return gamma_star * area_star; }

  double w_inverse_norm_bound(double dt) const
  {
    return l_inverse_norm() / (1.0 - 4.0 * gamma_star * dt * geometric * mu_weight);
  }

  double condition_bound(double dt) const
  {
    return w_inverse_norm_bound(dt) * (l_norm_bound + 4.0 * dt * k_geometric * mu_weight);
  }
};

/// Dense evaluation of the W invertibility bound; desk-scale grids only.
inline WInvertibilityBound newton_dt_bound(const PoissonProblem& p,
                                           const std::vector<Vector>& mu,
                                           const std::vector<double>& valences,
                                           std::size_t max_cells = 4096)
{
  const Grid2D& g = p.grid;
  if (g.size() > max_cells)
    throw std::length_error("newton_dt_bound: grid too large for the dense path");
  if (mu.size() != valences.size())
    throw std::invalid_argument("newton_dt_bound: one mu vector per species required");
  const auto rinv = linalg::inverse(
      linalg::DenseMatrix::from_sparse(assemble_symmetrized_poisson_matrix(p)));
  const Vector gamma = rinv.column_sums();
  const auto& area = g.cell_areas();

  WInvertibilityBound b;
  double best = -1.0;
  for (std::size_t k = 0; k < gamma.size(); ++k)
    if (gamma[k] * area[k] > best) {
      best = gamma[k] * area[k];
      b.index_star = k;
    }
  b.gamma_star = gamma[b.index_star];
  b.area_star = area[b.index_star];
  const double hxm = g.hx_min(), hxM = g.hx_max(), hym = g.hy_min(), hyM = g.hy_max();
  b.k_geometric = hyM / (hym * hxm * hxm) + hxM / (hxm * hym * hym);
  b.geometric = b.area_star * b.k_geometric;
  for (std::size_t l = 0; l < mu.size(); ++l) {
    double m = 0.0;
    for (double v : mu[l]) m = std::max(m, std::abs(v));
    b.mu_weight += valences[l] * valences[l] * m;
  }
  b.l_norm_bound = p.kappa * (4.0 / (hxm * hxm) + 4.0 / (hym * hym));
  b.dt_max = b.mu_weight > 0.0 ? 1.0 / (4.0 * b.gamma_star * b.geometric * b.mu_weight)
                               : std::numeric_limits<double>::infinity();
  return b;
}

}  // namespace pnp
