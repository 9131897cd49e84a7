#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "wipet/metrics.hpp"

using namespace wipet;

TEST_CASE("nrmse by hand") {
  const std::vector<double> ref{0.0, 1.0, 2.0, 4.0};
  const std::vector<double> test{1.0, 1.0, 2.0, 3.0};
  CHECK(nrmse(test, ref) == doctest::Approx(std::sqrt(2.0 / 4.0) / 4.0));
  CHECK(nrmse(ref, ref) == 0.0);
  const std::vector<bool> mask{false, true, true, true};
  CHECK(nrmse(test, ref, mask) == doctest::Approx(std::sqrt(1.0 / 3.0) / 3.0));
}

TEST_CASE("scaled nrmse ignores a global factor") {
  const std::vector<double> ref{0.5, 1.0, 3.0, 2.0};
  std::vector<double> test;
  for (double v : ref) test.push_back(7.0 * v);
  CHECK(nrmse_scaled(test, ref) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(nrmse(test, ref) > 1.0);
  // least-squares factor by hand
  const std::vector<double> t2{1.0, 0.0, 1.0, 0.0};
  const std::vector<double> r2{1.0, 0.0, 3.0, 0.0};
  const double a = 4.0 / 2.0;
  const double e = std::sqrt(((a - 1.0) * (a - 1.0) + (a - 3.0) * (a - 3.0)) / 4.0) / 3.0;
  CHECK(nrmse_scaled(t2, r2) == doctest::Approx(e));
}

TEST_CASE("correlation") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{2.0, 4.0, 6.0, 8.0};
  const std::vector<double> c{4.0, 3.0, 2.0, 1.0};
  CHECK(correlation(a, b) == doctest::Approx(1.0));
  CHECK(correlation(a, c) == doctest::Approx(-1.0));
  const std::vector<double> d{1.0, 0.0, 0.0, 1.0};
  CHECK(correlation(a, d) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("disk masks") {
  const GridSpec g{4, 2.0};
  const auto centre = disk_mask(g, 1.6);
  int n = 0;
  for (bool b : centre) n += b;
  CHECK(n == 12);  // radii sqrt(0.5) x4 and sqrt(2.5) x8
  const auto whole = disk_mask(g, 2.0, true);
  n = 0;
  for (bool b : whole) n += b;
  CHECK(n == 4);  // outer corners of the ring reach sqrt(5) > 2
}

TEST_CASE("poisson log-likelihood") {
  const std::vector<double> s{0.0, 2.0, 5.0};
  const std::vector<double> mu{1.0, 2.0, 4.0};
  CHECK(poisson_loglik(s, mu) == doctest::Approx(-1.0 + 2.0 * std::log(2.0) - 2.0 + 5.0 * std::log(4.0) - 4.0));
  const std::vector<double> s0{0.0, 3.0};
  const std::vector<double> mu0{0.0, 0.0};
  const double ll = poisson_loglik(s0, mu0);
  CHECK(std::isfinite(ll));
  CHECK(ll == 0.0);
}
