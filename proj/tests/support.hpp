#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pnp/pnp.hpp"

namespace pnp::test {

using linalg::DenseMatrix;

inline constexpr std::uint64_t kSeed = 20240607;

inline Vector random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double inf_norm(std::span<const double> v)
{
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline DenseMatrix dense(const linalg::SparseMatrix& a) { return DenseMatrix::from_sparse(a); }

/// Grid with randomly perturbed edges on [0,1]^2; spacing ratios stay within ~3.
inline Grid2D random_grid(int nx, int ny, std::mt19937_64& rng)
{
  auto edges = [&](int n) {
    std::vector<double> w = random_vector(std::size_t(n), 0.5, 1.5, rng);
    std::vector<double> e{0.0};
    double total = 0.0;
    for (double x : w) total += x;
    for (double x : w) e.push_back(e.back() + x / total);
    e.back() = 1.0;
    return e;
  };
  return Grid2D::from_edges(edges(nx), edges(ny));
}

/// Two monovalent species (q = +1, -1) with the given initial fields.
inline PnpProblem binary_problem(Grid2D g, double kappa, Field c1 = Field::constant(1.0),
                                 Field c2 = Field::constant(1.0))
{
  PnpProblem p{{std::move(g)}, {}};
  p.poisson.kappa = kappa;
  p.species.push_back({1.0, std::move(c1), Field::zero(), false});
  p.species.push_back({-1.0, std::move(c2), Field::zero(), false});
  return p;
}

/// The closed cell: grounded left electrode, V = 1 on the right, surface
/// charge -sin(pi x) on the top and bottom, uniform unit concentrations.
inline PnpProblem closed_cell_problem(int n, double kappa = 1.0)
{
  PnpProblem p = binary_problem(Grid2D::uniform(0, 1, 0, 1, n, n), kappa);
  p.poisson.v_right = Field::constant(1.0);
  const Field s([](double, double x, double) { return -std::sin(std::numbers::pi * x); }, false);
  p.poisson.sigma_bottom = s;
  p.poisson.sigma_top = s;
  return p;
}

/// Manufactured-solution problem on an n x n unit-square grid.
inline PnpProblem mms_problem(int n, double kappa = 1.0)
{
  PnpProblem p = binary_problem(Grid2D::uniform(0, 1, 0, 1, n, n), kappa,
                                Field(mms::concentration, true), Field(mms::concentration, true));
  p.poisson.v_left = Field(mms::potential, true);
  p.poisson.v_right = Field(mms::potential, true);
  p.poisson.rho_f = Field([kappa](double t, double x, double y) {
    return mms::fixed_charge(t, x, y, kappa);
  }, true);
  for (auto& s : p.species) {
    const double q = s.valence;
    s.source = Field([q](double t, double x, double y) { return mms::source(t, x, y, q); }, true);
    s.has_source = true;
  }
  return p;
}

/// A state at time t with the given concentrations and the Poisson potential.
inline PnpState consistent_state(const StepSolver& s, std::vector<Vector> c, double t = 0.0)
{
  PnpState st;
  st.t = t;
  st.c = std::move(c);
  st.psi = s.poisson().solve(ionic_charge(s.problem(), st.c), t);
  return st;
}

/// Dense W = L + sum_l q^2 A_l^{-1} K_l from a linearization.
inline DenseMatrix dense_W(const StepSolver& s, const NewtonWorkspace& ws)
{
  DenseMatrix w = dense(s.poisson().matrix());
  for (std::size_t l = 0; l < s.problem().n_species(); ++l) {
    const double q = s.problem().species[l].valence;
    DenseMatrix t = linalg::inverse(dense(ws.A[l])) * dense(ws.K[l]);
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) += q * q * t(r, c);
  }
  return w;
}

/// Linearization at u with dt shrunk until dt is at most half the W
/// invertibility bound evaluated at mu(dt).
struct HalfBoundPoint {
  double dt = 0.0;
  NewtonWorkspace ws;
  WInvertibilityBound bound;
};

inline HalfBoundPoint half_bound_point(const StepSolver& s, const PnpState& prev,
                                       std::span<const double> u, double dt_start)
{
  std::vector<double> q;
  for (const auto& sp : s.problem().species) q.push_back(sp.valence);
  HalfBoundPoint h;
  h.dt = dt_start;
  for (int it = 0; it < 60; ++it) {
    h.ws = s.linearize(u, prev, prev.t + h.dt, h.dt);
    h.bound = newton_dt_bound(s.problem().poisson, h.ws.mu, q);
    if (h.dt <= 0.5 * h.bound.dt_max) return h;
    h.dt = 0.45 * h.bound.dt_max;
  }
  throw std::runtime_error("half_bound_point: no consistent step size found");
}

/// Field that returns the cell value of v at the cell containing (x, y).
inline Field cellwise_field(const Grid2D& g, Vector v)
{
  return Field(
      [g, v = std::move(v)](double, double x, double y) {
        const auto& xe = g.x_edges();
        const auto& ye = g.y_edges();
        const int i = int(std::upper_bound(xe.begin(), xe.end(), x) - xe.begin()) - 1;
        const int j = int(std::upper_bound(ye.begin(), ye.end(), y) - ye.begin()) - 1;
        return v[g.index(std::clamp(i, 0, g.nx() - 1), std::clamp(j, 0, g.ny() - 1))];
      },
      false);
}

}  // namespace pnp::test
