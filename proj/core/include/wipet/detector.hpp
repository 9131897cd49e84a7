#pragma once

#include <optional>
#include <vector>

#include "wipet/geometry.hpp"

namespace wipet {

/// A coincidence registered by two crystals. Offsets are the tangential
/// coordinates (mm, |offset| <= L0 / 2) where the photon line crosses each
/// crystal segment; crystal_a < crystal_b.
struct Detection {
  int crystal_a = 0;
  int crystal_b = 0;
  double offset_a = 0.0;
  double offset_b = 0.0;
};

/// Photon-line hit testing against the active crystal segments, in the
/// scanner frame (gantry angle 0).
class DetectorRing {
 public:
  explicit DetectorRing(const ScannerGeometry& geom);

  /// Follows the line through `point` with direction `dir` both ways and
  /// reports the first crystal hit on each side, or nothing when either
  /// photon escapes.
  std::optional<Detection> detect(Vec2 point, Vec2 dir) const;

  /// Same, for a gantry rotated by `gantry_angle`; point and dir are in the
  /// fixed lab frame.
  std::optional<Detection> detect(Vec2 point, Vec2 dir, double gantry_angle) const;

  /// Lab-frame position of the tangential coordinate `offset` on a crystal
  /// when the gantry is at `gantry_angle`.
  Vec2 crystal_point(int crystal, double offset, double gantry_angle) const;

  const std::vector<Crystal>& crystals() const { return crystals_; }
  double half_length() const { return half_length_; }

 private:
  struct Hit {
    int crystal = -1;
    double t = 0.0;
    double offset = 0.0;
  };
  void scan(int crystal, Vec2 point, Vec2 dir, Hit& forward, Hit& backward) const;

  std::vector<Crystal> crystals_;
  std::vector<std::vector<int>> by_slot_;  // crystal indices per slot
  std::vector<double> radii_;              // distinct ring radii
  std::vector<double> slot_radius_;
  double first_angle_ = 0.0;
  double slot_angle_ = 0.0;
  double half_length_ = 0.0;
  double pitch_ = 0.0;
};

}  // namespace wipet
