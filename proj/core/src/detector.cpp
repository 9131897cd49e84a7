#include "wipet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wipet {

DetectorRing::DetectorRing(const ScannerGeometry& geom)
    : crystals_(active_crystals(geom)), half_length_(0.5 * geom.crystal_length) {
  const int slots = static_cast<int>(geom.sector_angles.size());
  by_slot_.resize(slots);
  for (const auto& c : crystals_) by_slot_[c.sector].push_back(c.index);
  slot_radius_ = geom.sector_radius;
  radii_ = geom.ring_radii;
  std::sort(radii_.begin(), radii_.end());
  radii_.erase(std::unique(radii_.begin(), radii_.end()), radii_.end());
  first_angle_ = geom.sector_angles.front();
  pitch_ = geom.crystal_pitch;
  slot_angle_ = 2.0 * std::numbers::pi / slots;
}

void DetectorRing::scan(int crystal, Vec2 point, Vec2 dir, Hit& forward, Hit& backward) const {
  const Crystal& c = crystals_[crystal];
  const double denom = cross(dir, c.tangent);
  if (denom == 0.0) return;
  const Vec2 rel = c.center - point;
  const double t = cross(rel, c.tangent) / denom;
  const double u = cross(rel, dir) / denom;
  if (std::abs(u) > half_length_) return;
  if (t > 0.0) {
    if (forward.crystal < 0 || t < forward.t) forward = {crystal, t, u};
  } else if (t < 0.0) {
    if (backward.crystal < 0 || t > backward.t) backward = {crystal, t, u};
  }
}

std::optional<Detection> DetectorRing::detect(Vec2 point, Vec2 dir) const {
  Hit forward;
  Hit backward;
  const int slots = static_cast<int>(by_slot_.size());
  const double pd = dot(point, dir);
  const double pp = dot(point, point);
  for (double rho : radii_) {
    const double disc = pd * pd - pp + rho * rho;
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    for (double t : {-pd + root, -pd - root}) {
      const Vec2 q = point + t * dir;
      const double a = std::atan2(q.y, q.x) - first_angle_;
      const int slot = static_cast<int>(std::lround(a / slot_angle_));
      for (int ds = -1; ds <= 1; ++ds) {
        const int s = ((slot + ds) % slots + slots) % slots;
        const auto& members = by_slot_[s];
        if (members.empty() || slot_radius_[s] != rho) continue;
        // Nearest crystal by arc position; its neighbours cover the rounding.
        const double rel = std::remainder(a - (slot + ds) * slot_angle_, 2.0 * std::numbers::pi);
        const auto n = static_cast<long>(members.size());
        const long k = std::lround(rel * rho / pitch_ + 0.5 * static_cast<double>(n - 1));
        for (long i = std::max(0L, k - 1); i <= std::min(n - 1, k + 1); ++i) {
          scan(members[static_cast<std::size_t>(i)], point, dir, forward, backward);
        }
      }
    }
  }
  if (forward.crystal < 0 || backward.crystal < 0) return std::nullopt;
  Detection d;
  if (forward.crystal < backward.crystal) {
    d = {forward.crystal, backward.crystal, forward.offset, backward.offset};
  } else {
    d = {backward.crystal, forward.crystal, backward.offset, forward.offset};
  }
  return d;
}

std::optional<Detection> DetectorRing::detect(Vec2 point, Vec2 dir, double gantry_angle) const {
  return detect(rotate(point, -gantry_angle), rotate(dir, -gantry_angle));
}

Vec2 DetectorRing::crystal_point(int crystal, double offset, double gantry_angle) const {
  const Crystal& c = crystals_[crystal];
  return rotate(c.center + offset * c.tangent, gantry_angle);
}

}  // namespace wipet
