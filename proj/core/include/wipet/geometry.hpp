#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace wipet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
Vec2 rotate(Vec2 v, double angle);

/// Which axial intersection of the partial ClearPET-like ring is modelled.
/// EightActive: four contiguous sectors plus the four opposite ones.
/// FourActive: every other sector of that set (the axially shifted half).
enum class IntersectionConfig { EightActive, FourActive };

/// User-facing scanner description. Defaults describe a partial ring with
/// 20 sector slots of which 8 are populated; dimensions are assumptions,
/// every one of them is overridable.
struct ScannerConfig {
  int sector_slots = 20;
  /// Indices of populated slots; empty selects the layout implied by `intersection`.
  std::vector<int> active_sectors;
  IntersectionConfig intersection = IntersectionConfig::EightActive;
  int crystals_per_sector = 8;
  double crystal_pitch = 2.3;   // mm, centre-to-centre along the arc
  double crystal_length = 2.0;  // mm, full tangential length (L0)
  std::vector<double> ring_radii = {70.0, 75.0};  // assigned to sectors cyclically
  double fov_radius = 40.0;
  double first_sector_angle = 0.0;  // rad, centre of slot 0
};

/// Validated scanner geometry.
struct ScannerGeometry {
  std::vector<double> sector_angles;  // rad, one per slot
  std::vector<bool> active_mask;      // one per slot
  std::vector<double> sector_radius;  // ring radius of each slot
  int crystals_per_sector = 0;
  double crystal_pitch = 0.0;
  double crystal_length = 0.0;  // L0, full tangential length
  std::vector<double> ring_radii;
  IntersectionConfig intersection = IntersectionConfig::EightActive;
  double fov_radius = 0.0;

  double min_radius() const;
  /// Same scanner with every sector rotated by `angle`.
  ScannerGeometry rotated(double angle) const;
};

/// One detector element: a tangential segment of length crystal_length
/// centred at `center`.
struct Crystal {
  int index = 0;   // dense index over active crystals
  int sector = 0;  // slot index
  double angle = 0.0;
  double radius = 0.0;
  Vec2 center;
  Vec2 tangent;  // unit vector along the segment
};

struct PairGeometry {
  int pair_id = 0;
  int crystal_a = 0;  // crystal_a < crystal_b
  int crystal_b = 0;
  double h = 0.0;      // distance from origin to the centre-connecting line
  double R = 0.0;      // half the centre-to-centre distance
  double L_eff = 0.0;  // effective half-length
  double w = 0.0;      // weight, L_eff^2
};

ScannerGeometry build_scanner(const ScannerConfig& config);

/// Sector slots populated for the given axial intersection of a `slots`-slot ring.
std::vector<int> default_active_sectors(int slots, IntersectionConfig intersection);

std::vector<Crystal> active_crystals(const ScannerGeometry& geom);

/// All pairs of active crystals in different sectors whose centre-connecting
/// line crosses the FOV disk, ordered by (crystal_a, crystal_b); pair_id is
/// the position in that order.
std::vector<PairGeometry> enumerate_pairs(const ScannerGeometry& geom);

/// Projection of a crystal of full length L0 at ring radius R onto the
/// normal of a line at distance h: (L0 / 2) * sqrt(1 - h^2 / R^2).
double effective_half_length(double h, double ring_radius, double L0);

inline double pair_weight(double L_eff) { return L_eff * L_eff; }

/// Dense (crystal_a, crystal_b) -> pair_id lookup; -1 where no pair exists.
class PairIndex {
 public:
  PairIndex(std::size_t n_crystals, const std::vector<PairGeometry>& pairs);
  std::optional<int> find(int a, int b) const;

 private:
  std::size_t n_;
  std::vector<int> ids_;
};

}  // namespace wipet
