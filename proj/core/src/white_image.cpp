#include "wipet/white_image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wipet/detector.hpp"
#include "wipet/error.hpp"
#include "wipet/metrics.hpp"
#include "wipet/parallel.hpp"
#include "wipet/random.hpp"
#include "wipet/response.hpp"

namespace wipet {

RadialProfile RadialProfile::tabulate(const std::function<double(double)>& fn, double r_max, double step) {
  if (!(step > 0.0) || !(r_max >= 0.0)) throw ConfigError("radial table needs step > 0 and r_max >= 0");
  RadialProfile p;
  p.step = step;
  const auto n = static_cast<std::size_t>(std::ceil(r_max / step)) + 1;
  p.values.resize(n);
  parallel_for(n, [&](std::size_t i) { p.values[i] = fn(static_cast<double>(i) * step); });
  return p;
}

double RadialProfile::operator()(double r) const {
  r = std::abs(r);
  if (values.empty() || r > r_max()) return 0.0;
  const double x = r / step;
  const auto i = std::min(static_cast<std::size_t>(x), values.size() - 1);
  if (i + 1 >= values.size()) return values.back();
  const double f = x - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

Image rasterize_radial(const RadialProfile& table, const GridSpec& grid) {
  grid.validate();
  Image img(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) img.at(ix, iy) = table(grid.radius(ix, iy));
  }
  return img;
}

Image rasterize_radial(const std::function<double(double)>& profile, const GridSpec& grid) {
  grid.validate();
  // Pixel radii repeat under the eight symmetries of the square grid; each
  // distinct one is evaluated once.
  const int half = (grid.n + 1) / 2;
  std::vector<std::pair<int, int>> keys;
  for (int a = 0; a < half; ++a) {
    for (int b = a; b < half; ++b) keys.emplace_back(a, b);
  }
  std::vector<double> values(keys.size());
  parallel_for(keys.size(), [&](std::size_t k) {
    values[k] = profile(grid.radius(half - 1 - keys[k].first, half - 1 - keys[k].second));
  });
  auto fold = [&](int i) { return std::min(i, grid.n - 1 - i); };
  Image img(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      int a = half - 1 - fold(ix);
      int b = half - 1 - fold(iy);
      if (a > b) std::swap(a, b);
      const std::size_t row = static_cast<std::size_t>(a) * half - static_cast<std::size_t>(a) * (a - 1) / 2;
      img.at(ix, iy) = values[row + static_cast<std::size_t>(b - a)];
    }
  }
  return img;
}

double white_image_value(const std::vector<PairGeometry>& pairs, double r) {
  if (pairs.empty()) throw NoCoincidencePossible("white image of an empty pair list");
  double weighted = 0.0;
  double total_w = 0.0;
  for (const auto& p : pairs) {
    total_w += p.w;
    if (p.w > 0.0) weighted += p.w * rotated_triangle(r, p.h, p.R, p.L_eff);
  }
  if (!(total_w > 0.0)) throw NoCoincidencePossible("all pair weights are zero");
  return weighted / (static_cast<double>(pairs.size()) * total_w);
}

RadialProfile white_image_profile(const std::vector<PairGeometry>& pairs, double r_max, double step) {
  if (pairs.empty()) throw NoCoincidencePossible("white image of an empty pair list");
  return RadialProfile::tabulate([&](double r) { return white_image_value(pairs, r); }, r_max, step);
}

Image white_image_analytic(const std::vector<PairGeometry>& pairs, const GridSpec& grid) {
  if (pairs.empty()) throw NoCoincidencePossible("white image of an empty pair list");
  return rasterize_radial([&](double r) { return white_image_value(pairs, r); }, grid);
}

Image white_image_analytic(const ScannerGeometry& geom, const GridSpec& grid) {
  return white_image_analytic(enumerate_pairs(geom), grid);
}

McWhiteImage white_image_mc(const ScannerGeometry& geom, const GridSpec& grid, std::uint64_t n_events,
                            std::uint64_t seed) {
  grid.validate();
  if (n_events < 1) throw ConfigError("white_image_mc needs n_events >= 1");
  const DetectorRing ring(geom);
  const double fov = geom.fov_radius;
  const double px = grid.pixel_size();
  const std::size_t n_blocks = (n_events + kRngBlockSize - 1) / kRngBlockSize;
  const std::size_t n_chunks = std::min<std::size_t>(n_blocks, 16);
  std::vector<std::vector<std::uint32_t>> hist(n_chunks);

  parallel_chunks(n_blocks, n_chunks, [&](std::size_t chunk, std::size_t b0, std::size_t b1) {
    auto& h = hist[chunk];
    h.assign(grid.size(), 0);
    for (std::size_t b = b0; b < b1; ++b) {
      BlockRng rng(seed, static_cast<std::uint64_t>(RngStream::WhiteImageMc), b);
      const std::uint64_t first = b * kRngBlockSize;
      const std::uint64_t last = std::min<std::uint64_t>(first + kRngBlockSize, n_events);
      for (std::uint64_t e = first; e < last; ++e) {
        const double rad = fov * std::sqrt(rng.uniform());
        const double ang = 2.0 * std::numbers::pi * rng.uniform();
        const double gantry = 2.0 * std::numbers::pi * rng.uniform();
        const double phi = std::numbers::pi * rng.uniform();
        const Vec2 p{rad * std::cos(ang), rad * std::sin(ang)};
        if (!ring.detect(p, {std::cos(phi), std::sin(phi)}, gantry)) continue;
        const int ix = std::clamp(static_cast<int>(std::floor((p.x + grid.fov_radius) / px)), 0, grid.n - 1);
        const int iy = std::clamp(static_cast<int>(std::floor((grid.fov_radius - p.y) / px)), 0, grid.n - 1);
        ++h[static_cast<std::size_t>(iy) * grid.n + ix];
      }
    }
  });

  McWhiteImage out{Image(grid), n_events, 0, false};
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (const auto& h : hist) {
    for (std::size_t i = 0; i < h.size(); ++i) counts[i] += h[i];
  }
  for (auto c : counts) out.accepted += c;
  if (out.accepted == 0) {
    out.empty = true;
    return out;
  }
  const double norm = 1.0 / static_cast<double>(out.accepted);
  for (std::size_t i = 0; i < counts.size(); ++i) out.image[i] = static_cast<double>(counts[i]) * norm;
  return out;
}

double white_image_oracle_nrmse(const std::vector<PairGeometry>& pairs, const Image& mc, int oversample) {
  if (oversample < 1) throw ConfigError("oversample must be >= 1");
  const GridSpec& grid = mc.grid();
  const GridSpec fine{grid.n * oversample, grid.fov_radius};
  const Image a = white_image_analytic(pairs, fine);
  Image binned(grid);
  for (int iy = 0; iy < fine.n; ++iy) {
    for (int ix = 0; ix < fine.n; ++ix) binned.at(ix / oversample, iy / oversample) += a.at(ix, iy);
  }
  const auto mask = disk_mask(grid, grid.fov_radius, true);
  double sa = 0.0;
  double sm = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    sa += binned[i];
    sm += mc[i];
  }
  if (!(sa > 0.0) || !(sm > 0.0)) throw DataError("white image comparison needs positive mass inside the FOV");
  std::vector<double> x(mask.size(), 0.0);
  std::vector<double> y(mask.size(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    x[i] = mc[i] / sm;
    y[i] = binned[i] / sa;
  }
  return nrmse(x, y, mask);
}

std::vector<bool> sensitivity_mask(const Image& white_image, double relative_floor) {
  const double floor = relative_floor * white_image.max();
  std::vector<bool> mask(white_image.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = white_image[i] >= floor && white_image[i] > 0.0;
  return mask;
}

}  // namespace wipet
