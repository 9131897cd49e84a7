#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "wipet/geometry.hpp"
#include "wipet/image.hpp"
#include "wipet/projection.hpp"

namespace wipet {

enum class PhantomKind { FiveRods, TwoHoles };

std::string_view to_string(PhantomKind k);
PhantomKind parse_phantom_kind(std::string_view name);

/// NEMA NU 4-2008 image-quality phantom sections. Defaults are the public
/// standard values, everything is configurable.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::FiveRods;
  double body_radius = 15.0;                            // TwoHoles body
  std::vector<double> rod_diameters = {1, 2, 3, 4, 5};  // FiveRods
  double rod_ring_radius = 7.0;                         // rod centres
  std::vector<double> hole_diameters = {8.0, 8.0};      // TwoHoles
  double hole_offset = 7.5;                             // hole centres at (+-offset, 0)
  double activity = 1.0;                                // per unit area

  void validate(const GridSpec& grid) const;
};

struct Disk {
  Vec2 center;
  double radius = 0.0;
};

/// Rod disks, or the body followed by the holes.
std::vector<Disk> phantom_disks(const PhantomSpec& spec);

/// Activity image; boundary pixels carry the covered area fraction.
Image make_phantom(const PhantomSpec& spec, const GridSpec& grid);

struct SimulationResult {
  EventList events;
  std::vector<Vec2> points;  // annihilation point of each event
  std::uint64_t trials = 0;
};

/// Draws annihilations proportional to `activity` until n_events coincidences
/// of listed pairs are recorded. Offsets are the true crossing positions.
SimulationResult simulate_events(const Image& activity, const ScannerGeometry& geom, std::uint64_t n_events,
                                 std::uint64_t seed);

}  // namespace wipet
