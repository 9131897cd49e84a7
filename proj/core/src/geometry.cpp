#include "wipet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wipet/error.hpp"

namespace wipet {

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

std::vector<int> default_active_sectors(int slots, IntersectionConfig intersection) {
  if (slots < 2) throw InvalidGeometry("at least two sector slots are required");
  // Four contiguous slots starting at 0 and the four diametrically opposite.
  const int opposite = slots / 2;
  std::vector<int> active;
  for (int side : {0, opposite}) {
    for (int k = 0; k < 4 && k < opposite; ++k) {
      if (intersection == IntersectionConfig::FourActive && k % 2 != 0) continue;
      active.push_back((side + k) % slots);
    }
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  return active;
}

double ScannerGeometry::min_radius() const { return *std::min_element(ring_radii.begin(), ring_radii.end()); }

ScannerGeometry ScannerGeometry::rotated(double angle) const {
  ScannerGeometry g = *this;
  for (double& a : g.sector_angles) a += angle;
  return g;
}

ScannerGeometry build_scanner(const ScannerConfig& config) {
  if (config.sector_slots < 2) throw InvalidGeometry("at least two sector slots are required");
  if (config.crystals_per_sector < 1) throw InvalidGeometry("crystals_per_sector must be positive");
  if (!(config.crystal_pitch > 0.0)) throw InvalidGeometry("crystal_pitch must be positive");
  if (!(config.crystal_length > 0.0)) throw InvalidGeometry("crystal_length must be positive");
  if (config.ring_radii.empty()) throw InvalidGeometry("at least one ring radius is required");
  for (double r : config.ring_radii) {
    if (!(r > 0.0)) throw InvalidGeometry("ring radii must be positive");
  }
  const double min_r = *std::min_element(config.ring_radii.begin(), config.ring_radii.end());
  if (!(config.crystal_length < min_r)) {
    throw InvalidGeometry("crystal length " + std::to_string(config.crystal_length) +
                          " must be smaller than the ring radius " + std::to_string(min_r));
  }
  if (!(config.fov_radius > 0.0) || !(config.fov_radius < min_r)) {
    throw InvalidGeometry("fov_radius must lie in (0, min ring radius)");
  }
  if (config.crystal_length > config.crystal_pitch) {
    throw InvalidGeometry("crystal_length exceeds crystal_pitch; neighbouring crystals would overlap");
  }

  const double slot_angle = 2.0 * std::numbers::pi / config.sector_slots;
  const double sector_span = (config.crystals_per_sector - 1) * config.crystal_pitch + config.crystal_length;
  if (sector_span / min_r > slot_angle) {
    throw InvalidGeometry("crystals of one sector do not fit in its slot");
  }

  ScannerGeometry g;
  g.crystals_per_sector = config.crystals_per_sector;
  g.crystal_pitch = config.crystal_pitch;
  g.crystal_length = config.crystal_length;
  g.ring_radii = config.ring_radii;
  g.intersection = config.intersection;
  g.fov_radius = config.fov_radius;
  g.active_mask.assign(config.sector_slots, false);
  for (int s = 0; s < config.sector_slots; ++s) {
    g.sector_angles.push_back(config.first_sector_angle + s * slot_angle);
    g.sector_radius.push_back(config.ring_radii[s % config.ring_radii.size()]);
  }
  const auto active = config.active_sectors.empty()
                          ? default_active_sectors(config.sector_slots, config.intersection)
                          : config.active_sectors;
  for (int s : active) {
    if (s < 0 || s >= config.sector_slots) throw InvalidGeometry("active sector index out of range");
    g.active_mask[s] = true;
  }
  if (std::count(g.active_mask.begin(), g.active_mask.end(), true) < 2) {
    throw NoCoincidencePossible("fewer than two active sectors");
  }
  if (enumerate_pairs(g).empty()) {
    throw NoCoincidencePossible("no pair of active crystals has a line of response through the FOV");
  }
  return g;
}

std::vector<Crystal> active_crystals(const ScannerGeometry& geom) {
  std::vector<Crystal> out;
  const int n = geom.crystals_per_sector;
  for (std::size_t s = 0; s < geom.sector_angles.size(); ++s) {
    if (!geom.active_mask[s]) continue;
    const double radius = geom.sector_radius[s];
    for (int k = 0; k < n; ++k) {
      Crystal c;
      c.index = static_cast<int>(out.size());
      c.sector = static_cast<int>(s);
      c.radius = radius;
      c.angle = geom.sector_angles[s] + (k - 0.5 * (n - 1)) * geom.crystal_pitch / radius;
      c.center = {radius * std::cos(c.angle), radius * std::sin(c.angle)};
      c.tangent = {-std::sin(c.angle), std::cos(c.angle)};
      out.push_back(c);
    }
  }
  return out;
}

double effective_half_length(double h, double ring_radius, double L0) {
  if (!(ring_radius > 0.0) || !(L0 > 0.0)) throw InvalidGeometry("effective_half_length needs R > 0, L0 > 0");
  if (!(h >= 0.0) || !(h < ring_radius)) {
    throw InvalidGeometry("line of response at h=" + std::to_string(h) + " does not cross the ring of radius " +
                          std::to_string(ring_radius));
  }
  const double q = h / ring_radius;
  return 0.5 * L0 * std::sqrt((1.0 - q) * (1.0 + q));
}

std::vector<PairGeometry> enumerate_pairs(const ScannerGeometry& geom) {
  const auto crystals = active_crystals(geom);
  std::vector<PairGeometry> pairs;
  for (std::size_t i = 0; i < crystals.size(); ++i) {
    for (std::size_t j = i + 1; j < crystals.size(); ++j) {
      const Crystal& a = crystals[i];
      const Crystal& b = crystals[j];
      if (a.sector == b.sector) continue;
      const Vec2 d = b.center - a.center;
      const double len = std::hypot(d.x, d.y);
      const double h = std::abs(cross(a.center, d)) / len;
      if (!(h < geom.fov_radius)) continue;
      PairGeometry p;
      p.pair_id = static_cast<int>(pairs.size());
      p.crystal_a = a.index;
      p.crystal_b = b.index;
      p.h = h;
      p.R = 0.5 * len;
      if (!(p.h < p.R)) throw InvalidGeometry("pair with h >= R; reduce fov_radius");
      p.L_eff = 0.5 * (effective_half_length(h, a.radius, geom.crystal_length) +
                       effective_half_length(h, b.radius, geom.crystal_length));
      p.w = pair_weight(p.L_eff);
      pairs.push_back(p);
    }
  }
  return pairs;
}

PairIndex::PairIndex(std::size_t n_crystals, const std::vector<PairGeometry>& pairs)
    : n_(n_crystals), ids_(n_crystals * n_crystals, -1) {
  for (const auto& p : pairs) {
    ids_[static_cast<std::size_t>(p.crystal_a) * n_ + p.crystal_b] = p.pair_id;
    ids_[static_cast<std::size_t>(p.crystal_b) * n_ + p.crystal_a] = p.pair_id;
  }
}

std::optional<int> PairIndex::find(int a, int b) const {
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n_ || static_cast<std::size_t>(b) >= n_) return std::nullopt;
  const int id = ids_[static_cast<std::size_t>(a) * n_ + b];
  if (id < 0) return std::nullopt;
  return id;
}

}  // namespace wipet
