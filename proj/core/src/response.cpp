#include "wipet/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wipet/error.hpp"
#include "wipet/parallel.hpp"

namespace wipet {
namespace {

constexpr double kPi = std::numbers::pi;

// Real parts of the complex arcsin / sqrt restricted to real arguments.
double re_asin(double x) {
  if (x >= 1.0) return kPi / 2.0;
  if (x <= -1.0) return -kPi / 2.0;
  return std::asin(x);
}

double re_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

// atan(z) / z and atanh(z) / z with their z -> 0 limits.
double atan_over(double z) { return std::abs(z) < 1e-8 ? 1.0 - z * z / 3.0 : std::atan(z) / z; }
double atanh_over(double z) { return std::abs(z) < 1e-8 ? 1.0 + z * z / 3.0 : std::atanh(z) / z; }

void require_shape(double R0, double L0) {
  if (!(R0 > 0.0) || !(L0 > 0.0) || !(L0 < R0)) {
    throw InvalidGeometry("response requires 0 < L0 < R0 (got R0=" + std::to_string(R0) +
                          ", L0=" + std::to_string(L0) + ")");
  }
}

}  // namespace

void TentParams::validate() const {
  require_shape(R0, L0);
  if (!(h >= 0.0)) throw InvalidGeometry("response shift h must be non-negative");
}

double tent_pdf(double x, double y, const TentParams& p) {
  const double ax = std::abs(x);
  const double ay = std::abs(y - p.h);
  if (ax > p.R0 || ay >= p.L0) return 0.0;
  const double norm = 1.0 / (2.0 * p.R0 * p.L0);
  if (ay < p.L0 / p.R0 * ax) return norm * p.R0 / (p.R0 + ax);
  return norm * p.R0 * p.R0 / ((p.R0 - ax) * (p.R0 + ax)) * (p.L0 - ay) / p.L0;
}

double rotated_exact(double r, double R0, double L0) {
  require_shape(R0, L0);
  if (r < 0.0) throw InvalidGeometry("rotated_exact requires r >= 0");

  const double D = std::hypot(R0, L0);
  if (r >= D * (1.0 - 1e-13)) return 0.0;

  const double C1 = R0 / L0;
  const double C2 = L0 * L0 / (D + R0);  // D - R0 without cancellation
  const double scale = 1.0 / (R0 * L0 * kPi);

  if (r <= L0) {
    const double u = std::sqrt((R0 - r) * (R0 + r));
    const double f = R0 / u;
    const double a = 2.0 * f * std::atan(std::sqrt((R0 - r) / (R0 + r)) * C2 / L0);
    const double b = 0.5 * C1 * std::log((L0 * L0 - C2 * (R0 + r)) / (L0 * L0 - C2 * (R0 - r)));
    const double c = f * (kPi / 2.0 - std::atan(L0 / u));
    return scale * (a + b + c);
  }

  const double s = std::sqrt((r - L0) * (r + L0));
  const double log_term = 0.5 * C1 * std::log((R0 + s) / (R0 - s) * (D - r) / (D + r));

  if (r <= R0) {
    // 2 f(r) atan(u X / L0), written as 2 R0 (X / L0) * atan(z) / z so that the
    // r -> R0 limit is reached without a 0 / 0.
    const double u = std::sqrt((R0 - r) * (R0 + r));
    const double X = (L0 * L0 + C2 * (s + r)) / ((s + r) * (R0 + r) - C2 * (R0 - r));
    const double z = u * X / L0;
    return scale * (log_term + 2.0 * R0 * X / L0 * atan_over(z));
  }

  // R0 < r < D. Both terms carry f(r) = R0 / u which diverges as r -> R0+;
  // the atanh(z) / z forms make the limit explicit.
  const double u = std::sqrt((r - R0) * (r + R0));
  const double z1 = C2 * u / (L0 * (r + R0));
  const double side = -R0 * std::log1p((r - R0) / R0) / u + 2.0 * R0 * C2 / (L0 * (r + R0)) * atanh_over(z1);
  const double g_term = R0 / L0 * (atanh_over(u / L0) - s / R0 * atanh_over(u * s / (L0 * R0)));
  return std::max(0.0, scale * (side + log_term + g_term));
}

double rotated_numeric(double r, double h, double R0, double L0, int n_steps) {
  const TentParams p{R0, L0, h};
  p.validate();
  if (r < 0.0) throw InvalidGeometry("rotated_numeric requires r >= 0");
  if (n_steps < 1000) throw InvalidGeometry("rotated_numeric requires n_steps >= 1000");
  if (r == 0.0) return tent_pdf(0.0, 0.0, p);

  // The integrand is even in x, so integrate phi over [-pi/2, pi/2] (x >= 0)
  // and use (1 / 2pi) * 2 * integral.
  std::vector<double> cuts = {-kPi / 2.0, kPi / 2.0};
  auto add = [&](double phi) {
    if (std::isfinite(phi) && phi > -kPi / 2.0 && phi < kPi / 2.0) cuts.push_back(phi);
  };
  auto add_asin = [&](double v) {
    if (std::abs(v) <= 1.0) add(std::asin(v));
  };
  if (r > R0) {
    add(std::acos(R0 / r));
    add(-std::acos(R0 / r));
  }
  add_asin((h + L0) / r);
  add_asin((h - L0) / r);
  add_asin(h / r);
  // |y - h| = (L0 / R0) x  <=>  r sqrt(1 + k^2) sin(phi -+ atan k) = h
  const double k = L0 / R0;
  const double amp = r * std::sqrt(1.0 + k * k);
  if (h <= amp) {
    const double base = std::asin(h / amp);
    for (double psi : {std::atan(k), -std::atan(k)}) {
      add(base + psi);
      add(kPi - base + psi);
      add(-kPi - base + psi);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  auto integrand = [&](double phi) { return tent_pdf(r * std::cos(phi), r * std::sin(phi), p); };

  struct Piece {
    double a, b;
  };
  std::vector<Piece> pieces;
  double support = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    if (integrand(0.5 * (a + b)) == 0.0) continue;
    pieces.push_back({a, b});
    support += b - a;
  }
  if (pieces.empty()) return 0.0;

  double total = 0.0;
  for (const Piece& pc : pieces) {
    int m = static_cast<int>(std::ceil(n_steps * (pc.b - pc.a) / support));
    m = std::max(m, 2);
    if (m % 2 != 0) ++m;
    const double dx = (pc.b - pc.a) / m;
    double acc = integrand(pc.a) + integrand(pc.b);
    for (int j = 1; j < m; ++j) acc += (j % 2 != 0 ? 4.0 : 2.0) * integrand(pc.a + j * dx);
    total += acc * dx / 3.0;
  }
  return total / kPi;
}

double rotated_dirac(double r, double r0) {
  if (r0 < 0.0 || r < 0.0) throw InvalidGeometry("rotated_dirac requires r, r0 >= 0");
  if (r == r0) return std::numeric_limits<double>::infinity();
  if (r < r0) return 0.0;
  return 1.0 / (kPi * std::sqrt((r - r0) * (r + r0)));
}

double rotated_triangle(double r, double h, double R0, double L0) {
  TentParams{R0, L0, h}.validate();
  if (r < 0.0) throw InvalidGeometry("rotated_triangle requires r >= 0");
  const double norm = 1.0 / (2.0 * L0 * R0);
  if (r == 0.0) return norm * std::max(0.0, 1.0 - h / L0);

  const double hp = L0 + h;
  const double hm = L0 - h;
  const double v = hp * re_asin(hp / r) - 2.0 * h * re_asin(h / r) + hm * re_asin(hm / r) +
                   re_sqrt(r * r - hp * hp) - 2.0 * re_sqrt(r * r - h * h) + re_sqrt(r * r - hm * hm);
  return std::max(0.0, norm * v / (kPi * L0));
}

double rotated_rect(double r, double h, double R0, double L0) {
  TentParams{R0, L0, h}.validate();
  if (r < 0.0) throw InvalidGeometry("rotated_rect requires r >= 0");
  const double norm = 1.0 / (4.0 * L0 * R0 * kPi);
  if (r == 0.0) {
    if (h < L0) return norm * kPi;
    if (h == L0) return norm * kPi / 2.0;
    return 0.0;
  }
  return std::max(0.0, norm * (re_asin((h + L0) / r) - re_asin((h - L0) / r)));
}

std::string_view to_string(Approximation a) {
  switch (a) {
    case Approximation::Dirac: return "dirac";
    case Approximation::Rect: return "rect";
    case Approximation::Triangle: return "triangle";
    case Approximation::Exact: return "exact";
    case Approximation::Numeric: return "numeric";
  }
  return "unknown";
}

Approximation parse_approximation(std::string_view name) {
  for (auto a : {Approximation::Dirac, Approximation::Rect, Approximation::Triangle, Approximation::Exact,
                 Approximation::Numeric}) {
    if (name == to_string(a)) return a;
  }
  if (name == "square") return Approximation::Rect;
  throw ConfigError("unknown approximation '" + std::string(name) + "'");
}

double rotated_profile(Approximation approx, double r, double h, double R0, double L0) {
  switch (approx) {
    case Approximation::Dirac: return rotated_dirac(r, h) / (2.0 * R0);
    case Approximation::Rect: return rotated_rect(r, h, R0, L0);
    case Approximation::Triangle: return rotated_triangle(r, h, R0, L0);
    case Approximation::Numeric: return rotated_numeric(r, h, R0, L0);
    case Approximation::Exact:
      if (h != 0.0) throw ConfigError("the exact rotated response exists only for h = 0");
      return rotated_exact(r, R0, L0);
  }
  return 0.0;
}

std::vector<RmseTable> rmse_vs_reference(const std::vector<Approximation>& approxs, double R0, double L0,
                                         const RmseProtocol& protocol) {
  require_shape(R0, L0);
  if (!(protocol.h_step > 0.0) || !(protocol.r_step > 0.0) || !(protocol.r_offset > 0.0)) {
    throw ConfigError("RMSE protocol steps must be positive");
  }
  for (auto a : approxs) {
    if (a == Approximation::Numeric) throw ConfigError("numeric is the reference, not an approximation");
  }

  const double eps = 1e-9 * R0;
  std::vector<double> hs;
  for (int k = 0;; ++k) {
    const double h = k * protocol.h_step;
    if (h + protocol.r_offset > R0 + eps) break;
    if (h > 0.0 && std::find(approxs.begin(), approxs.end(), Approximation::Exact) != approxs.end()) break;
    hs.push_back(h);
  }

  // rmse[a][k]
  std::vector<std::vector<double>> rmse(approxs.size(), std::vector<double>(hs.size(), 0.0));
  parallel_for(hs.size(), [&](std::size_t k) {
    const double h = hs[k];
    std::vector<double> sq(approxs.size(), 0.0);
    std::size_t count = 0;
    for (int j = 0;; ++j) {
      const double r = h + protocol.r_offset + j * protocol.r_step;
      if (r > R0 + eps) break;
      const double ref = rotated_numeric(r, h, R0, L0, protocol.quadrature_steps);
      for (std::size_t a = 0; a < approxs.size(); ++a) {
        const double d = rotated_profile(approxs[a], r, h, R0, L0) - ref;
        sq[a] += d * d;
      }
      ++count;
    }
    for (std::size_t a = 0; a < approxs.size(); ++a) rmse[a][k] = std::sqrt(sq[a] / static_cast<double>(count));
  });

  std::vector<RmseTable> tables;
  for (std::size_t a = 0; a < approxs.size(); ++a) {
    RmseTable t;
    t.approx = approxs[a];
    t.R0 = R0;
    t.L0 = L0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      t.rows.push_back({hs[k], rmse[a][k]});
      if (rmse[a][k] > t.max_rmse) {
        t.max_rmse = rmse[a][k];
        t.argmax_h = hs[k];
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

RmseTable rmse_vs_reference(Approximation approx, double R0, double L0, const RmseProtocol& protocol) {
  return rmse_vs_reference(std::vector<Approximation>{approx}, R0, L0, protocol).front();
}

}  // namespace wipet
