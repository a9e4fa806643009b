#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pnp/errors.hpp"
#include "pnp/linalg/sparse_matrix.hpp"

namespace pnp::linalg {

/// Zero-fill incomplete LU factorization, A ~ L U with L unit lower
/// triangular, both factors restricted to the sparsity pattern of A.
/// apply(x, y) computes y = U^{-1} L^{-1} x.
class Ilu0 {
public:
  explicit Ilu0(const SparseMatrix& a) : lu_(a) { factorize(); }

  std::size_t size() const noexcept { return lu_.rows(); }

  /// Combined factors: strict lower part holds L (unit diagonal implied),
  /// upper part including the diagonal holds U.
  const SparseMatrix& factors() const noexcept { return lu_; }

  void apply(std::span<const double> x, std::span<double> y) const
  {
    const auto& off = lu_.row_offsets();
    const auto& col = lu_.col_indices();
    const auto& val = lu_.values();
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t p = off[i]; p < diag_[i]; ++p) s -= val[p] * y[col[p]];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t p = diag_[i] + 1; p < off[i + 1]; ++p) s -= val[p] * y[col[p]];
      y[i] = s / val[diag_[i]];
    }
  }

private:
  void factorize()
  {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw std::invalid_argument("Ilu0: matrix must be square");
    const auto& off = lu_.row_offsets();
    const auto& col = lu_.col_indices();
    auto& val = lu_.values();

    diag_.assign(n, SparseMatrix::npos);
    for (std::size_t i = 0; i < n; ++i) {
      diag_[i] = lu_.find(i, i);
      if (diag_[i] == SparseMatrix::npos)
        throw FactorizationError("Ilu0: missing diagonal in row " + std::to_string(i), i);
    }

    std::vector<std::size_t> where(n, SparseMatrix::npos);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) where[col[p]] = p;
      for (std::size_t p = off[i]; p < diag_[i]; ++p) {
        const std::size_t k = col[p];
        const double pivot = val[diag_[k]];
        if (pivot == 0.0 || !std::isfinite(pivot))
          throw FactorizationError("Ilu0: zero pivot in row " + std::to_string(k), k);
        val[p] /= pivot;
        const double lik = val[p];
        for (std::size_t q = diag_[k] + 1; q < off[k + 1]; ++q) {
          const std::size_t w = where[col[q]];
          if (w != SparseMatrix::npos) val[w] -= lik * val[q];
        }
      }
      for (std::size_t p = off[i]; p < off[i + 1]; ++p) where[col[p]] = SparseMatrix::npos;
      if (val[diag_[i]] == 0.0 || !std::isfinite(val[diag_[i]]))
        throw FactorizationError("Ilu0: zero pivot in row " + std::to_string(i), i);
    }
  }

  SparseMatrix lu_;
  std::vector<std::size_t> diag_;
};

}  // namespace pnp::linalg
