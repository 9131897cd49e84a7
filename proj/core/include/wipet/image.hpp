#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wipet {

/// Square reconstruction grid centred on the rotation axis. Pixel (ix, iy)
/// has its centre at x = -fov + (ix + 0.5) * pixel, y = fov - (iy + 0.5) * pixel,
/// so row 0 is the top of the image.
struct GridSpec {
  int n = 256;
  double fov_radius = 40.0;

  double pixel_size() const { return 2.0 * fov_radius / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  double x_center(int ix) const { return -fov_radius + (ix + 0.5) * pixel_size(); }
  double y_center(int iy) const { return fov_radius - (iy + 0.5) * pixel_size(); }
  double radius(int ix, int iy) const { return std::hypot(x_center(ix), y_center(iy)); }

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Row-major n x n image of reals over a GridSpec.
class Image {
 public:
  Image() = default;
  explicit Image(GridSpec grid, double fill = 0.0);

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.n; }
  std::size_t size() const { return data_.size(); }

  double& at(int ix, int iy) { return data_[static_cast<std::size_t>(iy) * grid_.n + ix]; }
  double at(int ix, int iy) const { return data_[static_cast<std::size_t>(iy) * grid_.n + ix]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double sum() const;
  double max() const;
  double min() const;

  /// Image rotated by 90 degrees counter-clockwise about the grid centre.
  Image rotated90() const;

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

}  // namespace wipet
