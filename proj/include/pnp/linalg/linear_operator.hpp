#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>

namespace pnp::linalg {

/// Anything that maps a vector of length size() to a vector of the same length.
template <class T>
concept LinearOperator = requires(const T& op, std::span<const double> x, std::span<double> y) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply(x, y);
};

/// Identity map; the default "no preconditioner".
class IdentityOperator {
public:
  explicit IdentityOperator(std::size_t n) : n_(n) {}
  std::size_t size() const noexcept { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const
  {
    for (std::size_t i = 0; i < n_; ++i) y[i] = x[i];
  }

private:
  std::size_t n_;
};

/// Matrix-free operator backed by a callable.
class FunctionOperator {
public:
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  FunctionOperator(std::size_t n, Apply apply) : n_(n), apply_(std::move(apply)) {}
  std::size_t size() const noexcept { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const { apply_(x, y); }

private:
  std::size_t n_;
  Apply apply_;
};

}  // namespace pnp::linalg
