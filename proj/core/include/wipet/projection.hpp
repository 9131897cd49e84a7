#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wipet/geometry.hpp"
#include "wipet/image.hpp"

namespace wipet {

/// Parallel-beam sinogram sampling: radial bin centres
/// s_j = -s_max + (j + 0.5) ds, angles theta_k = k pi / n_theta.
struct SinogramGeometry {
  int n_s = 256;
  double s_max = 40.0;
  int n_theta = 180;

  double ds() const { return 2.0 * s_max / n_s; }
  double dtheta() const;
  double s_center(int j) const { return -s_max + (j + 0.5) * ds(); }
  double theta(int k) const { return k * dtheta(); }
  std::size_t size() const { return static_cast<std::size_t>(n_s) * static_cast<std::size_t>(n_theta); }

  void validate() const;
  bool operator==(const SinogramGeometry&) const = default;
};

/// Values stored angle-major: index = k_theta * n_s + j_s.
class Sinogram {
 public:
  Sinogram() = default;
  explicit Sinogram(SinogramGeometry geom, double fill = 0.0);

  const SinogramGeometry& geometry() const { return geom_; }
  std::size_t size() const { return data_.size(); }
  double& at(int j_s, int k_theta) { return data_[static_cast<std::size_t>(k_theta) * geom_.n_s + j_s]; }
  double at(int j_s, int k_theta) const { return data_[static_cast<std::size_t>(k_theta) * geom_.n_s + j_s]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double sum() const;

 private:
  SinogramGeometry geom_;
  std::vector<double> data_;
};

/// Ray-driven line integrals: each ray is sampled every pixel_size / 2 with
/// bilinear interpolation; samples lie on the lattice t = m * step along the
/// ray direction (-sin theta, cos theta).
Sinogram radon(const Image& image, const SinogramGeometry& sg);

/// radon restricted to the rays whose entry in `rays` is non-zero; the
/// others are left at 0. An empty mask selects every ray.
Sinogram radon(const Image& image, const SinogramGeometry& sg, std::span<const std::uint8_t> rays);

/// Exact transpose of radon: the same samples and weights, scattered.
Image back_project(const Sinogram& sino, const GridSpec& grid);

/// One list-mode coincidence. Offsets are tangential crystal coordinates of
/// the photon crossings; when absent, bin_events draws a dither uniformly
/// over each crystal.
struct Event {
  int pair_id = 0;
  double gantry_angle = 0.0;
  std::optional<std::array<double, 2>> offsets;
};

using EventList = std::vector<Event>;

struct BinnedEvents {
  Sinogram sinogram;
  std::uint64_t binned = 0;
  std::uint64_t overflow = 0;  // |s| >= s_max
};

/// (s, theta) of the line through a and b, theta folded into [0, pi).
std::pair<double, double> line_coordinates(Vec2 a, Vec2 b);

/// Histograms events into the nearest (s, theta) bin after applying each
/// event's gantry rotation to its (possibly dithered) crystal endpoints.
BinnedEvents bin_events(const EventList& events, const ScannerGeometry& geom, const SinogramGeometry& sg,
                        std::uint64_t seed);

}  // namespace wipet
