#pragma once

/**
 * @file dense.hpp
 * @brief Small dense matrices used as verification oracles.
 *
 * Partial-pivoting LU, inverse, 1-norms and a Cholesky-based positive
 * definiteness check. Intended for desk-scale problems (n up to a few
 * hundred), never for production solves.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pnp/linalg/sparse_matrix.hpp"

namespace pnp::linalg {

class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
  }

  static DenseMatrix identity(std::size_t n)
  {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_sparse(const SparseMatrix& s)
  {
    DenseMatrix m(s.rows(), s.cols());
    m.data_ = s.to_dense();
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void apply(std::span<const double> x, std::span<double> y) const
  {
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) s += data_[r * cols_ + c] * x[c];
      y[r] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const
  {
    std::vector<double> y(rows_);
    apply(x, y);
    return y;
  }

  DenseMatrix operator*(const DenseMatrix& o) const
  {
    DenseMatrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += a * o(k, j);
      }
    return m;
  }

  DenseMatrix operator+(const DenseMatrix& o) const
  {
    DenseMatrix m = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] += o.data_[i];
    return m;
  }

  DenseMatrix transpose() const
  {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  /// Maximum absolute column sum.
  double norm1() const
  {
    double best = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
      best = std::max(best, s);
    }
    return best;
  }

  std::vector<double> column_sums() const
  {
    std::vector<double> s(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) s[c] += (*this)(r, c);
    return s;
  }

  std::vector<double> row_sums() const
  {
    std::vector<double> s(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) s[r] += (*this)(r, c);
    return s;
  }

  double max_abs() const
  {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// LU factorization with partial pivoting, P A = L U.
class DenseLu {
public:
  explicit DenseLu(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.rows())
  {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw std::invalid_argument("DenseLu: matrix must be square");
    const double scale = std::max(lu_.max_abs(), std::numeric_limits<double>::min());
    const double tiny = double(n) * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t r = k + 1; r < n; ++r)
        if (std::abs(lu_(r, k)) > std::abs(lu_(piv, k))) piv = r;
      if (std::abs(lu_(piv, k)) <= tiny)
        throw SingularMatrixError("DenseLu: matrix is singular to working precision");
      if (piv != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(piv, c));
        std::swap(perm_[k], perm_[piv]);
      }
      const double d = lu_(k, k);
      for (std::size_t r = k + 1; r < n; ++r) {
        const double f = (lu_(r, k) /= d);
        if (f == 0.0) continue;
        for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
      }
    }
  }

  std::vector<double> solve(std::span<const double> b) const
  {
    const std::size_t n = lu_.rows();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (std::size_t c = 0; c < i; ++c) s -= lu_(i, c) * y[c];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t c = i + 1; c < n; ++c) s -= lu_(i, c) * y[c];
      y[i] = s / lu_(i, i);
    }
    return y;
  }

  DenseMatrix inverse() const
  {
    const std::size_t n = lu_.rows();
    DenseMatrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      e[c] = 1.0;
      const auto col = solve(e);
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
      e[c] = 0.0;
    }
    return inv;
  }

private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

/// Solves A x = b densely. Throws SingularMatrixError for singular A.
inline std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> b)
{
  if (b.size() != a.rows()) throw std::invalid_argument("dense_solve: dimension mismatch");
  return DenseLu(a).solve(b);
}

inline DenseMatrix inverse(const DenseMatrix& a) { return DenseLu(a).inverse(); }

/// 1-norm condition number.
inline double cond1(const DenseMatrix& a) { return a.norm1() * inverse(a).norm1(); }

/// True when the symmetric matrix admits a Cholesky factorization.
inline bool is_positive_definite(const DenseMatrix& a)
{
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

}  // namespace pnp::linalg
