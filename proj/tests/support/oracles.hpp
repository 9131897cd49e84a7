#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// Adaptive Gauss-Kronrod over [a, b] split at the given interior points.
template <typename F>
double integrate(F f, double a, double b, std::vector<double> cuts = {}, double tol = 1e-13) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (hi <= lo) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, tol);
  }
  return total;
}

/// Tanh-sinh for integrands with endpoint singularities.
template <typename F>
double integrate_singular(F f, double a, double b) {
  static boost::math::quadrature::tanh_sinh<double> ts(12);
  return ts.integrate(f, a, b);
}

/// Crystal-pair response written from its geometric definition: the fraction
/// of the detectable angular range that a point sees, for two parallel
/// segments of half-length L0 at x = +-R0 centred at y = h.
inline double tent(double x, double y, double R0, double L0, double h) {
  const double ax = std::abs(x);
  const double ay = std::abs(y - h);
  if (ax > R0 || ay > L0) return 0.0;
  // Lines through (ax, ay) hitting both segments: slopes k with
  // |ay + k (R0 - ax)| <= L0 and |ay - k (R0 + ax)| <= L0.
  const double lo = std::max((-L0 - ay) / (R0 - ax), (ay - L0) / (R0 + ax));
  const double hi = std::min((L0 - ay) / (R0 - ax), (ay + L0) / (R0 + ax));
  const double span = std::max(0.0, hi - lo);
  // A point at the centre sees slopes in [-L0/R0, L0/R0].
  return span / (2.0 * L0 / R0) / (2.0 * R0 * L0);
}

/// Angular average of the tent at radius r.
inline double rotated_tent(double r, double R0, double L0, double h) {
  if (r == 0.0) return tent(0.0, 0.0, R0, L0, h);
  std::vector<double> cuts = {pi / 2.0, 1.5 * pi};
  if (r > R0) {
    const double a = std::acos(R0 / r);
    cuts.insert(cuts.end(), {a, pi - a, pi + a, 2.0 * pi - a});
  }
  for (double v : {h - L0, h + L0}) {
    if (std::abs(v) < r) cuts.insert(cuts.end(), {std::asin(v / r), pi - std::asin(v / r)});
  }
  // edges of the central wedge |y - h| = (L0 / R0) |x|
  const double psi = std::atan(L0 / R0);
  const double amp = r * std::hypot(1.0, L0 / R0);
  if (std::abs(h) <= amp) {
    const double base = std::asin(h / amp);
    for (double s : {psi, -psi}) {
      cuts.push_back(base + s);
      cuts.push_back(pi - base + s);
    }
  }
  for (double& c : cuts) c = std::fmod(c + 4.0 * pi, 2.0 * pi);
  auto f = [&](double phi) { return tent(r * std::cos(phi), r * std::sin(phi), R0, L0, h); };
  return integrate(f, 0.0, 2.0 * pi, cuts, 1e-10) / (2.0 * pi);
}

/// Angular average of an infinite line at distance l from the origin,
/// density per unit length 1: 1 / (pi sqrt(r^2 - l^2)) for r > |l|.
/// Window-weighted version: integral over l of T(l) times that kernel.
template <typename Window>
double rotated_window(double r, Window T, double l_lo, double l_hi, std::vector<double> kinks = {}) {
  double total = 0.0;
  // Split at l = 0 and l = +-r so each piece has at most endpoint singularities.
  std::vector<double> cuts = {l_lo, l_hi};
  kinks.insert(kinks.end(), {-r, 0.0, r});
  for (double c : kinks) {
    if (c > l_lo && c < l_hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    if (std::abs(mid) >= r) continue;
    total += integrate_singular([&](double l) {
      const double d = r * r - l * l;
      return d > 0.0 ? T(l) / (pi * std::sqrt(d)) : 0.0;
    }, a, b);
  }
  return total;
}

}  // namespace oracle
