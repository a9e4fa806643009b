#pragma once

/**
 * @file grid.hpp
 * @brief Nonuniform cell-centred tensor-product grid on a rectangle.
 *
 * Cells are stored with the y index running fastest: flat index k = i*ny + j
 * (0-based). Spacings and their extremes are computed once at construction.
 */

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pnp {

class Grid2D {
public:
  /// Uniform grid on [a,b]x[c,d] with nx by ny cells.
  static Grid2D uniform(double a, double b, double c, double d, int nx, int ny)
  {
    if (nx < 1 || ny < 1)
      throw std::invalid_argument("Grid2D: cell counts must be positive");
    if (!(a < b) || !(c < d))
      throw std::invalid_argument("Grid2D: degenerate interval");
    std::vector<double> xe(nx + 1), ye(ny + 1);
    for (int i = 0; i <= nx; ++i) xe[i] = a + (b - a) * double(i) / nx;
    for (int j = 0; j <= ny; ++j) ye[j] = c + (d - c) * double(j) / ny;
    xe.back() = b;
    ye.back() = d;
    return Grid2D(std::move(xe), std::move(ye));
  }

  /// Grid from explicit, strictly increasing edge coordinates.
  static Grid2D from_edges(std::vector<double> x_edges, std::vector<double> y_edges)
  {
    return Grid2D(std::move(x_edges), std::move(y_edges));
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return std::size_t(nx_) * std::size_t(ny_); }

  std::size_t index(int i, int j) const noexcept { return std::size_t(i) * ny_ + j; }

  const std::vector<double>& x_edges() const noexcept { return x_edges_; }
  const std::vector<double>& y_edges() const noexcept { return y_edges_; }
  const std::vector<double>& x_centers() const noexcept { return x_centers_; }
  const std::vector<double>& y_centers() const noexcept { return y_centers_; }
  const std::vector<double>& hx() const noexcept { return hx_; }
  const std::vector<double>& hy() const noexcept { return hy_; }
  /// Centre-to-centre distances, length nx-1 (resp. ny-1).
  const std::vector<double>& hx_half() const noexcept { return hx_half_; }
  const std::vector<double>& hy_half() const noexcept { return hy_half_; }

  double x_center(int i) const { return x_centers_[i]; }
  double y_center(int j) const { return y_centers_[j]; }
  double hx(int i) const { return hx_[i]; }
  double hy(int j) const { return hy_[j]; }

  /// Distance across x-face f (0..nx). Interior faces give the centre
  /// distance; boundary faces give the distance to the mirrored ghost centre,
  /// which equals the adjacent cell width.
  double hx_face(int f) const
  {
    if (f == 0) return hx_.front();
    if (f == nx_) return hx_.back();
    return hx_half_[f - 1];
  }
  double hy_face(int f) const
  {
    if (f == 0) return hy_.front();
    if (f == ny_) return hy_.back();
    return hy_half_[f - 1];
  }

  double cell_area(int i, int j) const { return hx_[i] * hy_[j]; }
  /// Diagonal of the mass matrix: cell areas in flat order.
  const std::vector<double>& cell_areas() const noexcept { return areas_; }

  double hx_min() const noexcept { return hx_min_; }
  double hx_max() const noexcept { return hx_max_; }
  double hy_min() const noexcept { return hy_min_; }
  double hy_max() const noexcept { return hy_max_; }

  double x_lo() const { return x_edges_.front(); }
  double x_hi() const { return x_edges_.back(); }
  double y_lo() const { return y_edges_.front(); }
  double y_hi() const { return y_edges_.back(); }

private:
  Grid2D(std::vector<double> xe, std::vector<double> ye)
      : x_edges_(std::move(xe)), y_edges_(std::move(ye))
  {
    if (x_edges_.size() < 2 || y_edges_.size() < 2)
      throw std::invalid_argument("Grid2D: need at least two edges per direction");
    nx_ = int(x_edges_.size()) - 1;
    ny_ = int(y_edges_.size()) - 1;
    fill_axis(x_edges_, x_centers_, hx_, hx_half_, "x");
    fill_axis(y_edges_, y_centers_, hy_, hy_half_, "y");
    hx_min_ = *std::min_element(hx_.begin(), hx_.end());
    hx_max_ = *std::max_element(hx_.begin(), hx_.end());
    hy_min_ = *std::min_element(hy_.begin(), hy_.end());
    hy_max_ = *std::max_element(hy_.begin(), hy_.end());
    areas_.resize(size());
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) areas_[index(i, j)] = hx_[i] * hy_[j];
  }

  static void fill_axis(const std::vector<double>& edges, std::vector<double>& centers,
                        std::vector<double>& h, std::vector<double>& h_half,
                        const char* name)
  {
    const std::size_t n = edges.size() - 1;
    centers.resize(n);
    h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(edges[i + 1] > edges[i]))
        throw std::invalid_argument(std::string("Grid2D: ") + name +
                                    " edges must be strictly increasing");
      centers[i] = 0.5 * (edges[i] + edges[i + 1]);
      h[i] = edges[i + 1] - edges[i];
    }
    h_half.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h_half[i] = centers[i + 1] - centers[i];
  }

  int nx_ = 0, ny_ = 0;
  std::vector<double> x_edges_, y_edges_;
  std::vector<double> x_centers_, y_centers_;
  std::vector<double> hx_, hy_, hx_half_, hy_half_;
  std::vector<double> areas_;
  double hx_min_ = 0, hx_max_ = 0, hy_min_ = 0, hy_max_ = 0;
};

/// 1-based flat index of cell (i, j): (i-1)*ny + j.
inline long linear_index(long i, long j, long nx, long ny)
{
  if (i < 1 || i > nx || j < 1 || j > ny)
    throw std::out_of_range("linear_index: cell (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside grid");
  return (i - 1) * ny + j;
}

/// Inverse of linear_index.
inline std::pair<long, long> cell_of(long k, long nx, long ny)
{
  if (k < 1 || k > nx * ny)
    throw std::out_of_range("cell_of: flat index " + std::to_string(k) + " outside grid");
  return {(k - 1) / ny + 1, (k - 1) % ny + 1};
}

}  // namespace pnp
