#include "wipet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wipet/error.hpp"

namespace wipet {

namespace {

void check(std::span<const double> a, std::span<const double> b, const std::vector<bool>& mask) {
  if (a.size() != b.size()) throw MismatchedShapes("metric inputs differ in size");
  if (!mask.empty() && mask.size() != a.size()) throw MismatchedShapes("metric mask differs in size");
}

bool selected(const std::vector<bool>& mask, std::size_t i) { return mask.empty() || mask[i]; }

}  // namespace

std::vector<bool> disk_mask(const GridSpec& grid, double radius, bool whole_pixel) {
  std::vector<bool> mask(grid.size(), false);
  const double half_diag = whole_pixel ? grid.pixel_size() / std::sqrt(2.0) : 0.0;
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      mask[static_cast<std::size_t>(iy) * grid.n + ix] = grid.radius(ix, iy) + half_diag <= radius;
    }
  }
  return mask;
}

double nrmse(std::span<const double> test, std::span<const double> reference, const std::vector<bool>& mask) {
  check(test, reference, mask);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!selected(mask, i)) continue;
    const double d = test[i] - reference[i];
    sq += d * d;
    lo = std::min(lo, reference[i]);
    hi = std::max(hi, reference[i]);
    ++count;
  }
  if (count == 0) throw DataError("nrmse over an empty mask");
  const double range = hi - lo;
  if (!(range > 0.0)) throw DataError("nrmse reference has zero range");
  return std::sqrt(sq / static_cast<double>(count)) / range;
}

double nrmse_scaled(std::span<const double> test, std::span<const double> reference, const std::vector<bool>& mask) {
  check(test, reference, mask);
  double tr = 0.0;
  double tt = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!selected(mask, i)) continue;
    tr += test[i] * reference[i];
    tt += test[i] * test[i];
  }
  const double scale = tt > 0.0 ? tr / tt : 0.0;
  std::vector<double> scaled(test.begin(), test.end());
  for (double& v : scaled) v *= scale;
  return nrmse(scaled, reference, mask);
}

double correlation(std::span<const double> a, std::span<const double> b, const std::vector<bool>& mask) {
  check(a, b, mask);
  double ma = 0.0;
  double mb = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!selected(mask, i)) continue;
    ma += a[i];
    mb += b[i];
    ++count;
  }
  if (count < 2) throw DataError("correlation needs at least two samples");
  ma /= static_cast<double>(count);
  mb /= static_cast<double>(count);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!selected(mask, i)) continue;
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double poisson_loglik(std::span<const double> counts, std::span<const double> mean, double floor) {
  if (counts.size() != mean.size()) throw MismatchedShapes("log-likelihood inputs differ in size");
  double ll = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double mu = mean[i];
    if (mu < floor) {
      if (counts[i] == 0.0) ll -= mu;
      continue;
    }
    ll += (counts[i] > 0.0 ? counts[i] * std::log(mu) : 0.0) - mu;
  }
  return ll;
}

}  // namespace wipet
