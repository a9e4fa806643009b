#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace pnp::linalg {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
public:
  SparseMatrix() = default;

  /// Takes ownership of CSR arrays after validating them.
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values)
      : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)), values_(std::move(values))
  {
    validate();
  }

  /// Duplicates are summed.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries)
  {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<std::size_t> offsets(n_rows + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& t = entries[e];
      if (t.row >= n_rows || t.col >= n_cols)
        throw std::out_of_range("SparseMatrix: triplet outside matrix bounds");
      if (!cols.empty() && e > 0 && entries[e - 1].row == t.row && cols.back() == t.col) {
        vals.back() += t.value;
        continue;
      }
      cols.push_back(t.col);
      vals.push_back(t.value);
      ++offsets[t.row + 1];
    }
    for (std::size_t r = 0; r < n_rows; ++r) offsets[r + 1] += offsets[r];
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
  }

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t size() const noexcept { return n_rows_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  void apply(std::span<const double> x, std::span<double> y) const
  {
    for (std::size_t r = 0; r < n_rows_; ++r) {
      double s = 0.0;
      for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p)
        s += values_[p] * x[col_indices_[p]];
      y[r] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const
  {
    std::vector<double> y(n_rows_);
    apply(x, y);
    return y;
  }

  /// Position of (r, c) in values(), or npos when outside the pattern.
  std::size_t find(std::size_t r, std::size_t c) const
  {
    auto first = col_indices_.begin() + std::ptrdiff_t(row_offsets_[r]);
    auto last = col_indices_.begin() + std::ptrdiff_t(row_offsets_[r + 1]);
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return npos;
    return std::size_t(it - col_indices_.begin());
  }

  double at(std::size_t r, std::size_t c) const
  {
    const std::size_t p = find(r, c);
    return p == npos ? 0.0 : values_[p];
  }

  /// Row-major dense copy.
  std::vector<double> to_dense() const
  {
    std::vector<double> d(n_rows_ * n_cols_, 0.0);
    for (std::size_t r = 0; r < n_rows_; ++r)
      for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p)
        d[r * n_cols_ + col_indices_[p]] = values_[p];
    return d;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  void validate() const
  {
    if (row_offsets_.size() != n_rows_ + 1)
      throw std::invalid_argument("SparseMatrix: row_offsets must have n_rows+1 entries");
    if (row_offsets_.front() != 0 || row_offsets_.back() != col_indices_.size() ||
        col_indices_.size() != values_.size())
      throw std::invalid_argument("SparseMatrix: inconsistent CSR array lengths");
    for (std::size_t r = 0; r < n_rows_; ++r) {
      if (row_offsets_[r + 1] < row_offsets_[r])
        throw std::invalid_argument("SparseMatrix: row_offsets must be nondecreasing");
      for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
        if (col_indices_[p] >= n_cols_)
          throw std::invalid_argument("SparseMatrix: column index out of range in row " +
                                      std::to_string(r));
        if (p > row_offsets_[r] && col_indices_[p] <= col_indices_[p - 1])
          throw std::invalid_argument("SparseMatrix: columns not strictly increasing in row " +
                                      std::to_string(r));
      }
    }
  }

  std::size_t n_rows_ = 0, n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

}  // namespace pnp::linalg
