#pragma once

/**
 * @file mms.hpp
 * @brief Manufactured solution on [0,1]^2 for two monovalent species:
 *   c = pi^2 e^{-t} cos(pi x) cos(pi y) / 5 + 2 (both species),
 *   psi = e^{-t} cos(pi x) cos(pi y),
 * with the sources that make it exact for
 *   dc/dt = div(grad c + q c grad psi) + f,   -kappa lap psi = sum q c + rho_f.
 */

#include <cmath>
#include <numbers>

namespace pnp::mms {

inline constexpr double pi = std::numbers::pi;

inline double phi(double x, double y) { return std::cos(pi * x) * std::cos(pi * y); }

inline double concentration(double t, double x, double y)
{
  return pi * pi * std::exp(-t) * phi(x, y) / 5.0 + 2.0;
}

inline double potential(double t, double x, double y) { return std::exp(-t) * phi(x, y); }

/// rho_f = -kappa lap psi - sum_l q^l c^l; the ionic charge cancels.
inline double fixed_charge(double t, double x, double y, double kappa)
{
  return 2.0 * kappa * pi * pi * std::exp(-t) * phi(x, y);
}

/// f = dc/dt - lap c - q (grad c . grad psi + c lap psi).
inline double source(double t, double x, double y, double valence)
{
  const double e = std::exp(-t), p = phi(x, y);
  const double sx = std::sin(pi * x), cx = std::cos(pi * x);
  const double sy = std::sin(pi * y), cy = std::cos(pi * y);
  const double dc_dt = -pi * pi * e * p / 5.0;
  const double lap_c = -2.0 * pi * pi * pi * pi * e * p / 5.0;
  const double grad_dot = pi * pi / 5.0 * e * e * pi * pi * (sx * sx * cy * cy + cx * cx * sy * sy);
  const double lap_psi = -2.0 * pi * pi * e * p;
  return dc_dt - lap_c - valence * (grad_dot + concentration(t, x, y) * lap_psi);
}

}  // namespace pnp::mms
