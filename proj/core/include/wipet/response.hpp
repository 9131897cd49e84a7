#pragma once

#include <string_view>
#include <vector>

namespace wipet {

/// Crystal-to-crystal response of two parallel crystals of half-length L0
/// separated by 2 * R0, with the response centre shifted by h along y.
struct TentParams {
  double R0 = 50.0;
  double L0 = 10.0;
  double h = 0.0;

  void validate() const;
};

/// Density (mm^-2) of the annihilation position for a coincidence detected by
/// the pair. Piecewise: R0 / (R0 + |x|) where |y - h| < (L0 / R0)|x|,
/// R0^2 / (R0^2 - x^2) * (L0 - |y - h|) / L0 on the rest of the rectangle,
/// scaled by 1 / (2 R0 L0).
double tent_pdf(double x, double y, const TentParams& p);

/// Closed form of the full-turn rotation of the unshifted tent, h = 0.
/// Requires 0 < L0 < R0 and r >= 0.
double rotated_exact(double r, double R0, double L0);

/// Reference rotation of the shifted tent, (1 / 2pi) * integral over phi of
/// tent_pdf(r cos phi, r sin phi). Composite Simpson over the pieces between
/// the support breakpoints; n_steps is the total number of sub-intervals.
double rotated_numeric(double r, double h, double R0, double L0, int n_steps = 20000);

/// Full-turn rotation of a unit Dirac line at distance r0 from the origin.
/// Returns +infinity at r == r0 (the singular radius), never NaN.
double rotated_dirac(double r, double r0);

/// Rotation of the triangular-window approximation (single closed form for
/// every h >= 0).
double rotated_triangle(double r, double h, double R0, double L0);

/// Rotation of the rectangular-window approximation.
double rotated_rect(double r, double h, double R0, double L0);

enum class Approximation { Dirac, Rect, Triangle, Exact, Numeric };

std::string_view to_string(Approximation a);
Approximation parse_approximation(std::string_view name);

/// Evaluates `approx` at (r, h). The Dirac line is scaled by 1 / (2 R0) so it
/// carries the same per-unit-length mass as the tent. Exact is only defined
/// for h == 0 and throws otherwise.
double rotated_profile(Approximation approx, double r, double h, double R0, double L0);

/// Protocol of the approximation-vs-reference comparison.
struct RmseProtocol {
  double h_step = 0.1;
  double r_step = 0.1;
  double r_offset = 0.1;  // r-grid starts at h + r_offset
  int quadrature_steps = 1000;
};

struct RmseRow {
  double h = 0.0;
  double rmse = 0.0;
};

struct RmseTable {
  Approximation approx = Approximation::Triangle;
  double R0 = 0.0;
  double L0 = 0.0;
  std::vector<RmseRow> rows;
  double max_rmse = 0.0;
  double argmax_h = 0.0;
};

/// RMSE of each approximation against rotated_numeric on r in [h + offset, R0]
/// for h = 0, h_step, ... while the interval is non-empty. The reference is
/// evaluated once and shared by all requested approximations.
std::vector<RmseTable> rmse_vs_reference(const std::vector<Approximation>& approxs, double R0, double L0,
                                         const RmseProtocol& protocol = {});

RmseTable rmse_vs_reference(Approximation approx, double R0, double L0, const RmseProtocol& protocol = {});

}  // namespace wipet
