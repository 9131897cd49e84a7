#include "wipet/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wipet/detector.hpp"
#include "wipet/error.hpp"
#include "wipet/parallel.hpp"
#include "wipet/random.hpp"

namespace wipet {

std::string_view to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::FiveRods: return "five-rods";
    case PhantomKind::TwoHoles: return "two-holes";
  }
  return "?";
}

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "five-rods" || name == "rods") return PhantomKind::FiveRods;
  if (name == "two-holes" || name == "holes") return PhantomKind::TwoHoles;
  throw ConfigError("unknown phantom kind '" + std::string(name) + "' (five-rods|two-holes)");
}

namespace {

std::vector<Disk> rods(const PhantomSpec& spec) {
  std::vector<Disk> out;
  const auto n = spec.rod_diameters.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 0.5 * std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({{spec.rod_ring_radius * std::cos(a), spec.rod_ring_radius * std::sin(a)},
                   0.5 * spec.rod_diameters[k]});
  }
  return out;
}

std::vector<Disk> holes(const PhantomSpec& spec) {
  std::vector<Disk> out;
  const auto n = spec.hole_diameters.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({{spec.hole_offset * std::cos(a), spec.hole_offset * std::sin(a)}, 0.5 * spec.hole_diameters[k]});
  }
  return out;
}

/// Fraction of pixel (ix, iy) covered by the disk.
double coverage(const GridSpec& grid, int ix, int iy, const Disk& d) {
  if (!(d.radius > 0.0)) return 0.0;
  const double px = grid.pixel_size();
  const double cx = grid.x_center(ix);
  const double cy = grid.y_center(iy);
  const double dist = std::hypot(cx - d.center.x, cy - d.center.y);
  const double half_diag = px / std::sqrt(2.0);
  if (dist + half_diag <= d.radius) return 1.0;
  if (dist - half_diag >= d.radius) return 0.0;
  constexpr int kSub = 16;
  int inside = 0;
  const double r2 = d.radius * d.radius;
  for (int a = 0; a < kSub; ++a) {
    const double y = cy - 0.5 * px + (a + 0.5) * px / kSub - d.center.y;
    for (int b = 0; b < kSub; ++b) {
      const double x = cx - 0.5 * px + (b + 0.5) * px / kSub - d.center.x;
      if (x * x + y * y <= r2) ++inside;
    }
  }
  return static_cast<double>(inside) / (kSub * kSub);
}

}  // namespace

void PhantomSpec::validate(const GridSpec& grid) const {
  grid.validate();
  if (!(activity > 0.0)) throw ConfigError("phantom activity must be positive");
  const double fov = grid.fov_radius;
  if (kind == PhantomKind::FiveRods) {
    if (rod_diameters.empty()) throw ConfigError("five-rods phantom needs rod diameters");
    for (double d : rod_diameters) {
      if (!(d > 0.0)) throw ConfigError("rod diameters must be positive");
    }
    const auto r = rods(*this);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (std::hypot(r[i].center.x, r[i].center.y) + r[i].radius > fov) throw ConfigError("rod outside the FOV");
      for (std::size_t j = i + 1; j < r.size(); ++j) {
        const double dist = std::hypot(r[i].center.x - r[j].center.x, r[i].center.y - r[j].center.y);
        if (dist < r[i].radius + r[j].radius) {
          throw ConfigError("rods " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
    }
  } else {
    if (!(body_radius > 0.0) || body_radius > fov) throw ConfigError("phantom body must lie inside the FOV");
    for (const auto& h : holes(*this)) {
      if (h.radius < 0.0) throw ConfigError("hole diameters must be non-negative");
      if (std::hypot(h.center.x, h.center.y) + h.radius > body_radius) throw ConfigError("hole outside the body");
    }
  }
}

std::vector<Disk> phantom_disks(const PhantomSpec& spec) {
  if (spec.kind == PhantomKind::FiveRods) return rods(spec);
  std::vector<Disk> out{{{0.0, 0.0}, spec.body_radius}};
  for (const auto& h : holes(spec)) out.push_back(h);
  return out;
}

Image make_phantom(const PhantomSpec& spec, const GridSpec& grid) {
  spec.validate(grid);
  const auto disks = phantom_disks(spec);
  Image img(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      double f = 0.0;
      if (spec.kind == PhantomKind::FiveRods) {
        for (const auto& d : disks) f += coverage(grid, ix, iy, d);
      } else {
        f = coverage(grid, ix, iy, disks.front());
        for (std::size_t k = 1; k < disks.size(); ++k) f -= coverage(grid, ix, iy, disks[k]);
      }
      img.at(ix, iy) = spec.activity * std::clamp(f, 0.0, 1.0);
    }
  }
  return img;
}

SimulationResult simulate_events(const Image& activity, const ScannerGeometry& geom, std::uint64_t n_events,
                                 std::uint64_t seed) {
  const GridSpec& grid = activity.grid();
  std::vector<double> cdf(activity.size());
  double total = 0.0;
  for (std::size_t i = 0; i < activity.size(); ++i) {
    const double v = activity[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("activity must be finite and non-negative");
    total += v;
    cdf[i] = total;
  }
  if (!(total > 0.0)) throw DataError("activity image has no positive mass");

  const DetectorRing ring(geom);
  const auto pairs = enumerate_pairs(geom);
  const PairIndex index(ring.crystals().size(), pairs);
  const double px = grid.pixel_size();

  struct Candidate {
    std::uint64_t trial;
    Event event;
    Vec2 point;
  };
  constexpr std::size_t kWave = 16;
  constexpr std::uint64_t kMinTrialsForAbort = 4'000'000;

  SimulationResult out;
  std::uint64_t block = 0;
  while (out.events.size() < n_events) {
    std::vector<std::vector<Candidate>> found(kWave);
    parallel_for(kWave, [&](std::size_t w) {
      const std::uint64_t b = block + w;
      BlockRng rng(seed, static_cast<std::uint64_t>(RngStream::EventSimulation), b);
      for (std::uint64_t t = 0; t < kRngBlockSize; ++t) {
        const double u = rng.uniform() * total;
        const auto pix = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const std::size_t p = std::min(pix, cdf.size() - 1);
        const int ix = static_cast<int>(p % static_cast<std::size_t>(grid.n));
        const int iy = static_cast<int>(p / static_cast<std::size_t>(grid.n));
        const Vec2 point{grid.x_center(ix) + (rng.uniform() - 0.5) * px, grid.y_center(iy) + (rng.uniform() - 0.5) * px};
        const double gantry = 2.0 * std::numbers::pi * rng.uniform();
        const double phi = std::numbers::pi * rng.uniform();
        const auto hit = ring.detect(point, {std::cos(phi), std::sin(phi)}, gantry);
        if (!hit) continue;
        const auto id = index.find(hit->crystal_a, hit->crystal_b);
        if (!id) continue;
        Event ev{*id, gantry, std::array<double, 2>{hit->offset_a, hit->offset_b}};
        found[w].push_back({b * kRngBlockSize + t, ev, point});
      }
    });
    for (const auto& f : found) {
      for (const auto& c : f) {
        if (out.events.size() == n_events) break;
        out.events.push_back(c.event);
        out.points.push_back(c.point);
        out.trials = c.trial + 1;
      }
    }
    block += kWave;
    if (out.events.size() < n_events) {
      out.trials = block * kRngBlockSize;
      if (out.trials >= kMinTrialsForAbort &&
          static_cast<double>(out.events.size()) < 1e-6 * static_cast<double>(out.trials)) {
        throw DataError("acceptance rate below 1e-6 after " + std::to_string(out.trials) +
                        " trials; check that the activity lies inside the scanner's field of view");
      }
    }
  }
  return out;
}

}  // namespace wipet
