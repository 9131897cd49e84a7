#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "wipet/detector.hpp"
#include "wipet/error.hpp"
#include "wipet/parallel.hpp"
#include "wipet/phantom.hpp"
#include "wipet/projection.hpp"

using namespace wipet;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("sinogram geometry") {
  const SinogramGeometry sg{256, 40.0, 180};
  CHECK(sg.ds() == doctest::Approx(80.0 / 256.0));
  CHECK(sg.s_center(0) == doctest::Approx(-40.0 + 40.0 / 256.0));
  CHECK(sg.theta(90) == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(sg.size() == 256u * 180u);
  CHECK_THROWS(SinogramGeometry{0, 40.0, 180}.validate());
  CHECK_THROWS(SinogramGeometry{10, -1.0, 180}.validate());
}

TEST_CASE("zero in, zero out") {
  const GridSpec grid{32, 10.0};
  const SinogramGeometry sg{32, 10.0, 20};
  const Sinogram s = radon(Image(grid), sg);
  for (double v : s.values()) CHECK(v == 0.0);
  const Image b = back_project(Sinogram(sg), grid);
  for (double v : b.values()) CHECK(v == 0.0);
}

TEST_CASE("centred impulse projects onto s = 0") {
  const GridSpec grid{65, 10.0};
  const SinogramGeometry sg{65, 10.0, 36};
  Image img(grid);
  img.at(32, 32) = 1.0;
  const Sinogram s = radon(img, sg);
  for (int k = 0; k < sg.n_theta; ++k) {
    double total = 0.0;
    double centred = 0.0;
    for (int j = 0; j < sg.n_s; ++j) {
      total += s.at(j, k);
      if (std::abs(sg.s_center(j)) <= grid.pixel_size() * 1.01) centred += s.at(j, k);
    }
    CHECK(total > 0.0);
    CHECK(centred == doctest::Approx(total));
  }
}

TEST_CASE("uniform disk projects to chord lengths") {
  const GridSpec grid{256, 40.0};
  const SinogramGeometry sg{256, 40.0, 60};
  PhantomSpec spec;
  spec.kind = PhantomKind::TwoHoles;
  spec.body_radius = 20.0;
  spec.hole_diameters = {};
  const Image disk = make_phantom(spec, grid);
  const Sinogram s = radon(disk, sg);
  for (int k = 0; k < sg.n_theta; ++k) {
    for (int j = 0; j < sg.n_s; ++j) {
      const double x = sg.s_center(j);
      if (std::abs(x) > 16.0) continue;
      const double chord = 2.0 * std::sqrt(20.0 * 20.0 - x * x);
      CHECK(s.at(j, k) == doctest::Approx(chord).epsilon(0.01));
    }
  }
}

TEST_CASE("back projection is the adjoint of the projection") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridSpec grid{128, 40.0};
  const SinogramGeometry sg{128, 40.0, 90};
  for (int trial = 0; trial < 20; ++trial) {
    Image x(grid);
    for (double& v : x.values()) v = u(rng);
    Sinogram y(sg);
    for (double& v : y.values()) v = u(rng);
    const double lhs = dot(radon(x, sg).values(), y.values());
    const double rhs = dot(x.values(), back_project(y, grid).values());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
  }
}

TEST_CASE("masked projection only fills selected rays") {
  const GridSpec grid{32, 10.0};
  const SinogramGeometry sg{32, 10.0, 12};
  Image img(grid, 1.0);
  const Sinogram full = radon(img, sg);
  std::vector<std::uint8_t> rays(sg.size(), 0);
  for (std::size_t i = 0; i < rays.size(); i += 3) rays[i] = 1;
  const Sinogram part = radon(img, sg, rays);
  for (std::size_t i = 0; i < rays.size(); ++i) CHECK(part[i] == (rays[i] ? full[i] : 0.0));
  const Sinogram all = radon(img, sg, {});
  for (std::size_t i = 0; i < rays.size(); ++i) CHECK(all[i] == full[i]);
}

TEST_CASE("single bin back-projects onto a line") {
  const GridSpec grid{64, 10.0};
  const SinogramGeometry sg{64, 10.0, 8};
  Sinogram s(sg);
  const int j = 40;
  const int k = 3;
  s.at(j, k) = 1.0;
  const Image b = back_project(s, grid);
  const double th = sg.theta(k);
  int lit = 0;
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      if (b.at(ix, iy) == 0.0) continue;
      ++lit;
      const double dist = grid.x_center(ix) * std::cos(th) + grid.y_center(iy) * std::sin(th) - sg.s_center(j);
      CHECK(std::abs(dist) < 1.5 * grid.pixel_size());
    }
  }
  CHECK(lit > grid.n);
}

TEST_CASE("line coordinates") {
  auto [s, th] = line_coordinates({-5.0, 2.0}, {5.0, 2.0});
  CHECK(s == doctest::Approx(2.0));
  CHECK(th == doctest::Approx(std::numbers::pi / 2.0));
  auto [s2, th2] = line_coordinates({3.0, -5.0}, {3.0, 5.0});
  CHECK(std::abs(s2) == doctest::Approx(3.0));
  CHECK(th2 >= 0.0);
  CHECK(th2 < std::numbers::pi);
  CHECK(s2 * std::cos(th2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(line_coordinates({1.0, 1.0}, {1.0, 1.0}), DataError);
}

TEST_CASE("event binning") {
  ScannerConfig c;
  c.sector_slots = 2;
  c.active_sectors = {0, 1};
  c.crystals_per_sector = 1;
  c.ring_radii = {60.0};
  c.fov_radius = 30.0;
  const auto geom = build_scanner(c);
  const SinogramGeometry sg{61, 30.0, 180};

  SUBCASE("empty list") {
    const auto b = bin_events({}, geom, sg, 1);
    CHECK(b.sinogram.sum() == 0.0);
    CHECK(b.binned == 0);
    CHECK(b.overflow == 0);
  }

  SUBCASE("diametral pair without dither") {
    const EventList ev{{0, 0.0, std::array<double, 2>{0.0, 0.0}}};
    const auto b = bin_events(ev, geom, sg, 1);
    REQUIRE(b.binned == 1);
    // crystals on the x axis: the line is y = 0, normal angle pi / 2
    CHECK(b.sinogram.at(30, 90) == 1.0);
    CHECK(b.sinogram.sum() == 1.0);
  }

  SUBCASE("gantry rotation moves the angle bin") {
    const double step = std::numbers::pi / 180.0;
    const EventList ev{{0, 10.0 * step, std::array<double, 2>{0.0, 0.0}}, {0, 95.0 * step, std::array<double, 2>{0.0, 0.0}}};
    const auto b = bin_events(ev, geom, sg, 1);
    CHECK(b.sinogram.at(30, 100) == 1.0);
    CHECK(b.sinogram.at(30, 5) == 1.0);
  }

  SUBCASE("dither stays within the crystal") {
    EventList ev(20000, Event{0, 0.0, std::nullopt});
    const auto b = bin_events(ev, geom, sg, 9);
    CHECK(b.binned == 20000);
    // endpoints move by at most L0 / 2 each: |s| <= L0 / 2 and the angle by atan(L0 / (2R))
    double spread = 0.0;
    for (int k = 0; k < sg.n_theta; ++k) {
      for (int j = 0; j < sg.n_s; ++j) {
        if (b.sinogram.at(j, k) > 0.0) spread = std::max(spread, std::abs(sg.s_center(j)));
      }
    }
    CHECK(spread <= geom.crystal_length / 2.0 + sg.ds());
    CHECK(spread > 0.0);
  }

  SUBCASE("unknown pair") {
    CHECK_THROWS_AS(bin_events({{3, 0.0, std::nullopt}}, geom, sg, 1), DataError);
  }
}

TEST_CASE("binning conserves counts and is deterministic") {
  const auto geom = build_scanner({});
  const GridSpec grid{128, 40.0};
  PhantomSpec spec;
  spec.kind = PhantomKind::TwoHoles;
  spec.hole_diameters = {};
  const auto sim = simulate_events(make_phantom(spec, grid), geom, 50000, 4);
  const SinogramGeometry narrow{128, 10.0, 180};
  set_num_threads(1);
  const auto a = bin_events(sim.events, geom, narrow, 2);
  set_num_threads(3);
  const auto b = bin_events(sim.events, geom, narrow, 2);
  set_num_threads(0);
  CHECK(a.overflow > 0);
  CHECK(a.sinogram.sum() == doctest::Approx(50000.0 - static_cast<double>(a.overflow)));
  CHECK(a.binned + a.overflow == 50000);
  for (std::size_t i = 0; i < a.sinogram.size(); ++i) REQUIRE(a.sinogram[i] == b.sinogram[i]);
}
