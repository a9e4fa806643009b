#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pnp/grid.hpp"
#include "pnp/linalg/sparse_matrix.hpp"

namespace pnp {

/// Zero-valued five-point CSR matrix on a grid together with the value
/// positions of each row's west/south/centre/north/east entries.
///
/// Face-by-face assembly writes through these slots, so every matrix built on
/// the same grid shares one pattern and no sorting happens in the hot loop.
struct FivePointStencil {
  enum Slot { West = 0, South = 1, Center = 2, North = 3, East = 4 };
  static constexpr std::size_t none = linalg::SparseMatrix::npos;

  linalg::SparseMatrix matrix;
  std::vector<std::array<std::size_t, 5>> slots;

  explicit FivePointStencil(const Grid2D& grid)
  {
    const int nx = grid.nx(), ny = grid.ny();
    const std::size_t n = grid.size();
    std::vector<std::size_t> offsets(n + 1, 0), cols;
    cols.reserve(5 * n);
    slots.assign(n, {none, none, none, none, none});
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const std::size_t k = grid.index(i, j);
        auto& s = slots[k];
        auto push = [&](std::size_t c, Slot slot) {
          s[slot] = cols.size();
          cols.push_back(c);
        };
        if (i > 0) push(grid.index(i - 1, j), West);
        if (j > 0) push(k - 1, South);
        push(k, Center);
        if (j + 1 < ny) push(k + 1, North);
        if (i + 1 < nx) push(grid.index(i + 1, j), East);
        offsets[k + 1] = cols.size();
      }
    std::vector<double> vals(cols.size(), 0.0);
    matrix = linalg::SparseMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
  }
};

}  // namespace pnp
