#include "wipet/image.hpp"

#include <algorithm>
#include <numeric>

#include "wipet/error.hpp"

namespace wipet {

void GridSpec::validate() const {
  if (n < 2) throw ConfigError("grid needs at least 2 pixels per side");
  if (!(fov_radius > 0.0)) throw ConfigError("grid fov_radius must be positive");
}

Image::Image(GridSpec grid, double fill) : grid_(grid), data_(grid.size(), fill) { grid_.validate(); }

double Image::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Image::max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }

double Image::min() const { return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end()); }

Image Image::rotated90() const {
  Image out(grid_);
  const int n = grid_.n;
  // (x, y) -> (-y, x): column ix of the result reads row ix of the source.
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) out.at(iy, n - 1 - ix) = at(ix, iy);
  }
  return out;
}

}  // namespace wipet
