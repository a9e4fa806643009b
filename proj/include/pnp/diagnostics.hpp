#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pnp/grid.hpp"
#include "pnp/problem.hpp"

namespace pnp {

/// sum_ij c_ij hx_i hy_j
inline double total_mass(std::span<const double> c, const Grid2D& g)
{
  if (c.size() != g.size()) throw std::invalid_argument("total_mass: vector length mismatch");
  const auto& area = g.cell_areas();
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * area[k];
  return s;
}

/// Discrete free energy of a state, boundary data taken at state.t.
///
/// Bulk: sum_l p (c log c + q c psi / 2) + p rho_f psi / 2.
/// Dirichlet faces: -hy kappa V (V - psi_adj) / hx_adj.
/// Surface-charge faces: (hx / 2) sigma (psi_adj + hy_adj sigma / (2 kappa)).
inline double discrete_free_energy(const PnpProblem& p, const PnpState& s)
{
  const Grid2D& g = p.grid();
  const auto& pp = p.poisson;
  const auto& area = g.cell_areas();
  if (s.c.size() != p.n_species() || s.psi.size() != g.size())
    throw std::invalid_argument("discrete_free_energy: state does not match problem");

  double f = 0.0;
  for (std::size_t l = 0; l < p.n_species(); ++l) {
    const double q = p.species[l].valence;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double c = s.c[l][k];
      if (!(c > 0.0)) {
        std::ostringstream msg;
        msg << "discrete_free_energy: non-positive concentration " << c << " (species " << l
            << ", cell " << k << ")";
        throw std::domain_error(msg.str());
      }
      f += area[k] * (c * std::log(c) + 0.5 * q * c * s.psi[k]);
    }
  }
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t k = g.index(i, j);
      f += 0.5 * area[k] * pp.rho_f(s.t, g.x_center(i), g.y_center(j)) * s.psi[k];
    }

  const int nx = g.nx(), ny = g.ny();
  for (int j = 0; j < ny; ++j) {
    const double y = g.y_center(j);
    const double vl = pp.v_left(s.t, g.x_lo(), y), vr = pp.v_right(s.t, g.x_hi(), y);
    f -= g.hy(j) * pp.kappa *
         (vr * (vr - s.psi[g.index(nx - 1, j)]) / g.hx(nx - 1) +
          vl * (vl - s.psi[g.index(0, j)]) / g.hx(0));
  }
  for (int i = 0; i < nx; ++i) {
    const double x = g.x_center(i);
    const double sb = pp.sigma_bottom(s.t, x, g.y_lo()), st = pp.sigma_top(s.t, x, g.y_hi());
    f += 0.5 * g.hx(i) *
         (st * (s.psi[g.index(i, ny - 1)] + g.hy(ny - 1) * st / (2.0 * pp.kappa)) +
          sb * (s.psi[g.index(i, 0)] + g.hy(0) * sb / (2.0 * pp.kappa)));
  }
  return f;
}

/// sum over cells with x_center < split of sum_l q^l c^l hx hy.
inline double net_charge_left(const PnpProblem& p, const PnpState& s, double split = 0.0)
{
  const Grid2D& g = p.grid();
  double rho = 0.0;
  for (int i = 0; i < g.nx() && g.x_center(i) < split; ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const std::size_t k = g.index(i, j);
      for (std::size_t l = 0; l < p.n_species(); ++l)
        rho += p.species[l].valence * s.c[l][k] * g.cell_area(i, j);
    }
  return rho;
}

struct StepDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  double F_h = 0.0;
  std::vector<double> mass;
  std::vector<double> min_c;
  double net_charge_left = 0.0;
  int newton_iters = 0;
  std::size_t linear_iters = 0;
};

inline StepDiagnostics diagnose(const PnpProblem& p, const PnpState& s, double dt = 0.0,
                                int iterations = 0, std::size_t linear_iterations = 0,
                                double split = 0.0)
{
  StepDiagnostics d;
  d.t = s.t;
  d.dt = dt;
  d.F_h = discrete_free_energy(p, s);
  for (const auto& c : s.c) {
    d.mass.push_back(total_mass(c, p.grid()));
    d.min_c.push_back(c.empty() ? std::numeric_limits<double>::infinity()
                                : *std::min_element(c.begin(), c.end()));
  }
  d.net_charge_left = net_charge_left(p, s, split);
  d.newton_iters = iterations;
  d.linear_iters = linear_iterations;
  return d;
}

}  // namespace pnp
