#pragma once

/**
 * @file bicgstab.hpp
 * @brief Right-preconditioned BiCGSTAB over the LinearOperator concept.
 *
 * Convergence is declared on the relative 2-norm of the true residual
 * ||b - A x|| <= tol ||b||. The recurrence residual is only used to decide
 * when to check; a mismatch triggers a restart from the true residual.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "pnp/errors.hpp"
#include "pnp/linalg/linear_operator.hpp"

namespace pnp::linalg {

struct BicgstabOptions {
  double rel_tol = 1e-10;
  /// 0 selects 10 * n.
  std::size_t max_iter = 0;
  /// Give up when the best residual has not improved for this many iterations.
  std::size_t stagnation_window = 200;
};

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

template <LinearOperator Op>
double true_residual(const Op& op, std::span<const double> b, std::span<const double> x,
                     std::vector<double>& r)
{
  op.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace detail

/// Solves op(x) = b. x holds the initial guess on entry and the solution on
/// return. Throws BreakdownError when rho or omega vanish and
/// ConvergenceError (carrying the best iterate) when max_iter is exceeded.
template <LinearOperator Op, LinearOperator Pre>
SolveReport bicgstab(const Op& op, std::span<const double> b, std::span<double> x,
                     const Pre& precond, const BicgstabOptions& opts = {})
{
  using detail::dot;
  using detail::norm2;
  const std::size_t n = op.size();
  if (b.size() != n || x.size() != n || precond.size() != n)
    throw std::invalid_argument("bicgstab: dimension mismatch");
  if (!(opts.rel_tol > 0.0)) throw std::invalid_argument("bicgstab: tolerance must be positive");
  const std::size_t max_iter = opts.max_iter ? opts.max_iter : 10 * std::max<std::size_t>(n, 1);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, 0.0};
  }
  const double target = opts.rel_tol * bnorm;

  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
  std::vector<double> best(x.begin(), x.end());
  double rnorm = detail::true_residual(op, b, x, r);
  double best_norm = rnorm;
  std::size_t best_iter = 0;
  std::vector<double> history{rnorm / bnorm};
  if (rnorm <= target) return {0, rnorm / bnorm};

  auto fail = [&](bool breakdown, const char* why, std::size_t it) {
    std::ostringstream msg;
    msg << "bicgstab: " << why << " after " << it << " iterations (relative residual "
        << best_norm / bnorm << ", target " << opts.rel_tol << ")";
    if (breakdown) throw BreakdownError(msg.str(), best, history);
    throw ConvergenceError(msg.str(), best, history);
  };

  // Confirms convergence on the true residual; on mismatch the recurrence is
  // restarted from the true residual.
  bool restart = true;
  double rho_old = 1.0, alpha = 1.0, omega = 1.0;
  auto confirm = [&]() {
    rnorm = detail::true_residual(op, b, x, r);
    if (rnorm < best_norm) {
      best_norm = rnorm;
      std::copy(x.begin(), x.end(), best.begin());
    }
    if (rnorm <= target) return true;
    restart = true;
    return false;
  };

  constexpr double tiny = std::numeric_limits<double>::epsilon() *
                          std::numeric_limits<double>::epsilon();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    if (restart) {
      std::copy(r.begin(), r.end(), rhat.begin());
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho_old = alpha = omega = 1.0;
      restart = false;
    }
    const double rho = dot(rhat, r);
    if (std::abs(rho) <= tiny * norm2(rhat) * norm2(r)) {
      if (confirm()) return {it, rnorm / bnorm};
      fail(true, "breakdown (rho = 0)", it);
    }
    const double beta = (rho / rho_old) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precond.apply(p, phat);
    op.apply(phat, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0 || !std::isfinite(rv)) {
      if (confirm()) return {it, rnorm / bnorm};
      fail(true, "breakdown (rhat . v = 0)", it);
    }
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      if (confirm()) return {it, rnorm / bnorm};
      continue;
    }
    precond.apply(s, shat);
    op.apply(shat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    const double recur = norm2(r);
    history.push_back(recur / bnorm);
    if (!std::isfinite(recur)) fail(true, "non-finite residual", it);
    if (recur <= target) {
      if (confirm()) return {it, rnorm / bnorm};
      continue;
    }
    if (recur < best_norm) {
      best_norm = recur;
      best_iter = it;
      std::copy(x.begin(), x.end(), best.begin());
    }
    if (std::abs(omega) <= tiny) {
      if (confirm()) return {it, rnorm / bnorm};
      fail(true, "breakdown (omega = 0)", it);
    }
    if (it - best_iter > opts.stagnation_window) fail(false, "stagnated", it);
    rho_old = rho;
  }
  confirm();
  fail(false, "iteration limit reached", max_iter);
  return {};
}

template <LinearOperator Op>
SolveReport bicgstab(const Op& op, std::span<const double> b, std::span<double> x,
                     const BicgstabOptions& opts = {})
{
  return bicgstab(op, b, x, IdentityOperator(op.size()), opts);
}

}  // namespace pnp::linalg
