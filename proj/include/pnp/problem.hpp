#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/poisson.hpp"

namespace pnp {

struct SpeciesSpec {
  double valence = 1.0;
  Field initial = Field::constant(1.0);
  /// Volumetric source f^l(t, x, y); only used when has_source is set.
  Field source = Field::zero();
  bool has_source = false;
};

/// A full PNP problem: electrostatics plus the ionic species.
struct PnpProblem {
  PoissonProblem poisson;
  std::vector<SpeciesSpec> species;

  const Grid2D& grid() const noexcept { return poisson.grid; }
  std::size_t n_species() const noexcept { return species.size(); }

  /// True when the energy is a Lyapunov functional: static boundary data and
  /// fixed charge, no sources.
  bool static_data() const
  {
    if (!poisson.static_data()) return false;
    for (const auto& s : species)
      if (s.has_source) return false;
    return true;
  }

  void validate() const
  {
    if (species.empty()) throw std::invalid_argument("PnpProblem: at least one species required");
    if (!(poisson.kappa > 0.0)) throw std::invalid_argument("PnpProblem: kappa must be positive");
  }
};

/// Discrete state at one time level.
struct PnpState {
  double t = 0.0;
  Vector psi;
  std::vector<Vector> c;
};

/// Samples a field at cell centres.
inline Vector sample(const Field& f, const Grid2D& g, double t)
{
  Vector v(g.size());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) v[g.index(i, j)] = f(t, g.x_center(i), g.y_center(j));
  return v;
}

/// sum_l q^l c^l.
inline Vector ionic_charge(const PnpProblem& p, const std::vector<Vector>& c)
{
  Vector rho(p.grid().size(), 0.0);
  for (std::size_t l = 0; l < p.n_species(); ++l)
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] += p.species[l].valence * c[l][k];
  return rho;
}

}  // namespace pnp
