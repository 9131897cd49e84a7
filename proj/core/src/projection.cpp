#include "wipet/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wipet/detector.hpp"
#include "wipet/error.hpp"
#include "wipet/parallel.hpp"
#include "wipet/random.hpp"

namespace wipet {

namespace {

constexpr std::size_t kBackProjectChunks = 12;

/// Zero-bordered copy layout: pixel (ix, iy) lives at (iy + 1) * (n + 2) + ix + 1.
std::size_t padded_size(int n) { return static_cast<std::size_t>(n + 2) * static_cast<std::size_t>(n + 2); }

/// Shrinks [lo, hi] to the t-range where a + b t stays inside [-1, n].
void clip(double a, double b, double n, double& lo, double& hi) {
  if (b == 0.0) {
    if (a < -1.0 || a > n) hi = lo - 1.0;
    return;
  }
  double t0 = (-1.0 - a) / b;
  double t1 = (n - a) / b;
  if (t0 > t1) std::swap(t0, t1);
  lo = std::max(lo, t0);
  hi = std::min(hi, t1);
}

/// Visits every sample of ray j at angle (c, s) = (cos, sin) theta:
/// visit(padded index of the upper-left neighbour, fu, fv) with the bilinear
/// fractions fu, fv. Samples lie on t = m * step, step = pixel_size / 2,
/// restricted to the FOV disk.
template <typename Visit>
void trace_ray(const GridSpec& grid, const SinogramGeometry& sg, int j, double c, double s, Visit&& visit) {
  const int n = grid.n;
  const double px = grid.pixel_size();
  const double fov = grid.fov_radius;
  const double dt = 0.5 * px;
  const double sv = sg.s_center(j);
  if (std::abs(sv) >= fov) return;
  const double half_chord = std::sqrt((fov - sv) * (fov + sv));
  // u = au + bu t, v = av + bv t in pixel-index units.
  const double au = (sv * c + fov) / px - 0.5;
  const double bu = -s / px;
  const double av = (fov - sv * s) / px - 0.5;
  const double bv = -c / px;
  double lo = -half_chord;
  double hi = half_chord;
  clip(au, bu, n, lo, hi);
  clip(av, bv, n, lo, hi);
  if (!(hi >= lo)) return;
  const auto m0 = static_cast<long>(std::ceil(lo / dt));
  const auto m1 = static_cast<long>(std::floor(hi / dt));
  const int stride = n + 2;
  const double du = bu * dt;
  const double dv = bv * dt;
  double u = au + bu * (static_cast<double>(m0) * dt);
  double v = av + bv * (static_cast<double>(m0) * dt);
  for (long m = m0; m <= m1; ++m, u += du, v += dv) {
    // u, v >= -1 inside the clipped range, so truncation of u + 1 is floor.
    const int iu = std::min(static_cast<int>(u + 1.0) - 1, n - 1);
    const int iv = std::min(static_cast<int>(v + 1.0) - 1, n - 1);
    const std::size_t base = static_cast<std::size_t>(iv + 1) * stride + static_cast<std::size_t>(iu + 1);
    visit(base, u - iu, v - iv);
  }
}

void check_coverage(const GridSpec& grid, const SinogramGeometry& sg) {
  grid.validate();
  sg.validate();
  if (sg.s_max < grid.fov_radius) {
    throw ConfigError("sinogram s_max " + std::to_string(sg.s_max) + " is smaller than fov_radius " +
                      std::to_string(grid.fov_radius));
  }
}

}  // namespace

double SinogramGeometry::dtheta() const { return std::numbers::pi / n_theta; }

void SinogramGeometry::validate() const {
  if (n_s < 1 || n_theta < 1) throw ConfigError("sinogram needs n_s >= 1 and n_theta >= 1");
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw ConfigError("sinogram s_max must be positive");
}

Sinogram::Sinogram(SinogramGeometry geom, double fill) : geom_(geom) {
  geom_.validate();
  data_.assign(geom_.size(), fill);
}

double Sinogram::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

Sinogram radon(const Image& image, const SinogramGeometry& sg) { return radon(image, sg, {}); }

Sinogram radon(const Image& image, const SinogramGeometry& sg, std::span<const std::uint8_t> rays) {
  if (!rays.empty() && rays.size() != sg.size()) throw MismatchedShapes("ray mask does not match the sinogram");
  const GridSpec& grid = image.grid();
  check_coverage(grid, sg);
  const int n = grid.n;
  std::vector<double> padded(padded_size(n), 0.0);
  for (int iy = 0; iy < n; ++iy) {
    std::copy_n(image.values().data() + static_cast<std::size_t>(iy) * n, n, &padded[static_cast<std::size_t>(iy + 1) * (n + 2) + 1]);
  }
  Sinogram out(sg);
  const int stride = n + 2;
  const double dt = 0.5 * grid.pixel_size();
  parallel_for(static_cast<std::size_t>(sg.n_theta), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    const double c = std::cos(sg.theta(k));
    const double s = std::sin(sg.theta(k));
    for (int j = 0; j < sg.n_s; ++j) {
      if (!rays.empty() && rays[kk * static_cast<std::size_t>(sg.n_s) + j] == 0) continue;
      double acc = 0.0;
      trace_ray(grid, sg, j, c, s, [&](std::size_t b, double fu, double fv) {
        const double top = padded[b] + fu * (padded[b + 1] - padded[b]);
        const double bottom = padded[b + stride] + fu * (padded[b + stride + 1] - padded[b + stride]);
        acc += top + fv * (bottom - top);
      });
      out.at(j, k) = dt * acc;
    }
  });
  return out;
}

Image back_project(const Sinogram& sino, const GridSpec& grid) {
  const SinogramGeometry& sg = sino.geometry();
  check_coverage(grid, sg);
  const int n = grid.n;
  const int stride = n + 2;
  const double dt = 0.5 * grid.pixel_size();
  const std::size_t chunks = std::min<std::size_t>(kBackProjectChunks, static_cast<std::size_t>(sg.n_theta));
  std::vector<std::vector<double>> partial(chunks);
  parallel_chunks(static_cast<std::size_t>(sg.n_theta), chunks, [&](std::size_t chunk, std::size_t k0, std::size_t k1) {
    auto& buf = partial[chunk];
    buf.assign(padded_size(n), 0.0);
    for (std::size_t kk = k0; kk < k1; ++kk) {
      const int k = static_cast<int>(kk);
      const double c = std::cos(sg.theta(k));
      const double s = std::sin(sg.theta(k));
      for (int j = 0; j < sg.n_s; ++j) {
        const double y = dt * sino.at(j, k);
        if (y == 0.0) continue;
        trace_ray(grid, sg, j, c, s, [&](std::size_t b, double fu, double fv) {
          const double top = (1.0 - fv) * y;
          const double bottom = fv * y;
          buf[b] += top - fu * top;
          buf[b + 1] += fu * top;
          buf[b + stride] += bottom - fu * bottom;
          buf[b + stride + 1] += fu * bottom;
        });
      }
    }
  });
  Image out(grid);
  for (const auto& buf : partial) {
    for (int iy = 0; iy < n; ++iy) {
      const double* src = &buf[static_cast<std::size_t>(iy + 1) * stride + 1];
      double* dst = &out[static_cast<std::size_t>(iy) * n];
      for (int ix = 0; ix < n; ++ix) dst[ix] += src[ix];
    }
  }
  return out;
}

std::pair<double, double> line_coordinates(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = std::hypot(d.x, d.y);
  if (!(len > 0.0)) throw DataError("degenerate line of response");
  const Vec2 normal{-d.y / len, d.x / len};
  double theta = std::atan2(normal.y, normal.x);
  double s = dot(a, normal);
  if (theta < 0.0) {
    theta += std::numbers::pi;
    s = -s;
  }
  if (theta >= std::numbers::pi) {
    theta -= std::numbers::pi;
    s = -s;
  }
  return {s, theta};
}

BinnedEvents bin_events(const EventList& events, const ScannerGeometry& geom, const SinogramGeometry& sg,
                        std::uint64_t seed) {
  sg.validate();
  const DetectorRing ring(geom);
  const auto pairs = enumerate_pairs(geom);
  for (std::size_t e = 0; e < events.size(); ++e) {
    const int id = events[e].pair_id;
    if (id < 0 || static_cast<std::size_t>(id) >= pairs.size()) {
      throw DataError("event " + std::to_string(e) + " references unknown pair_id " + std::to_string(id));
    }
  }
  const double half = ring.half_length();
  const std::size_t n_blocks = (events.size() + kRngBlockSize - 1) / kRngBlockSize;
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(n_blocks, 16));
  std::vector<std::vector<std::uint32_t>> hist(chunks);
  std::vector<std::uint64_t> overflow(chunks, 0);

  parallel_chunks(n_blocks, chunks, [&](std::size_t chunk, std::size_t b0, std::size_t b1) {
    auto& h = hist[chunk];
    h.assign(sg.size(), 0);
    for (std::size_t b = b0; b < b1; ++b) {
      BlockRng rng(seed, static_cast<std::uint64_t>(RngStream::Dither), b);
      const std::size_t first = b * kRngBlockSize;
      const std::size_t last = std::min(first + kRngBlockSize, events.size());
      for (std::size_t e = first; e < last; ++e) {
        const Event& ev = events[e];
        const double d1 = rng.uniform(-half, half);
        const double d2 = rng.uniform(-half, half);
        const auto offs = ev.offsets.value_or(std::array<double, 2>{d1, d2});
        const PairGeometry& p = pairs[static_cast<std::size_t>(ev.pair_id)];
        const Vec2 a = ring.crystal_point(p.crystal_a, offs[0], ev.gantry_angle);
        const Vec2 bpt = ring.crystal_point(p.crystal_b, offs[1], ev.gantry_angle);
        auto [s, theta] = line_coordinates(a, bpt);
        auto k = static_cast<int>(std::lround(theta / sg.dtheta()));
        if (k >= sg.n_theta) {
          k -= sg.n_theta;
          s = -s;
        }
        const double js = std::floor((s + sg.s_max) / sg.ds());
        if (!(js >= 0.0) || !(js < sg.n_s)) {
          ++overflow[chunk];
          continue;
        }
        ++h[static_cast<std::size_t>(k) * sg.n_s + static_cast<std::size_t>(js)];
      }
    }
  });

  BinnedEvents out{Sinogram(sg), 0, 0};
  for (std::size_t c = 0; c < chunks; ++c) {
    out.overflow += overflow[c];
    for (std::size_t i = 0; i < hist[c].size(); ++i) out.sinogram[i] += hist[c][i];
  }
  out.binned = static_cast<std::uint64_t>(events.size()) - out.overflow;
  return out;
}

}  // namespace wipet
