#include "wipet/recon.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "wipet/error.hpp"
#include "wipet/metrics.hpp"

namespace wipet {

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::Proposed: return "proposed";
    case Baseline::UncompensatedMLEM: return "uncompensated";
    case Baseline::FBP: return "fbp";
  }
  return "?";
}

Baseline parse_baseline(std::string_view name) {
  if (name == "proposed") return Baseline::Proposed;
  if (name == "uncompensated" || name == "mlem") return Baseline::UncompensatedMLEM;
  if (name == "fbp") return Baseline::FBP;
  throw ConfigError("unknown baseline '" + std::string(name) + "' (proposed|uncompensated|fbp)");
}

void ReconConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
  if (!(init_value > 0.0)) throw ConfigError("init_value must be positive");
  if (!(epsilon_div > 0.0)) throw ConfigError("epsilon_div must be positive");
  grid.validate();
  if (baseline == Baseline::Proposed) {
    if (!white_image) throw ConfigError("the proposed reconstruction needs a white image");
    if (!(white_image->grid() == grid)) throw MismatchedShapes("white image grid differs from the reconstruction grid");
  }
}

namespace {

Image update(const Image& I, const Sinogram& projection, const Sinogram& S, const Image& WI, double eps,
             StepDiagnostics* diag) {
  Sinogram ratio(S.geometry());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] == 0.0) continue;
    if (projection[i] < eps) {
      if (S[i] > 0.0) ++bad;
      continue;
    }
    ratio[i] = S[i] / projection[i];
  }
  if (diag) {
    diag->inconsistent_bins = bad;
    diag->inconsistent_data = bad > 0;
  }
  const Image back = back_project(ratio, I.grid());
  const double floor = 1e-12 * WI.max();
  Image out(I.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = WI[i];
    out[i] = (w > 0.0 && w >= floor) ? I[i] * back[i] / w : 0.0;
  }
  return out;
}

/// Rays carrying counts; the others have a zero ratio whatever the projection.
std::vector<std::uint8_t> measured_rays(const Sinogram& S) {
  std::vector<std::uint8_t> rays(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    const double v = S[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("sinogram values must be finite and non-negative");
    rays[i] = v > 0.0 ? 1 : 0;
  }
  return rays;
}

/// Poisson log-likelihood with the total expected count taken from the
/// sensitivity image: sum_i (R I)_i = <I, R* 1>.
double loglik(const Sinogram& S, const Sinogram& projection, const Image& I, const Image& sens, double eps) {
  double ll = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] > 0.0 && projection[i] >= eps) ll += S[i] * std::log(projection[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < I.size(); ++i) total += I[i] * sens[i];
  return ll - total;
}

}  // namespace

Image mlem_step(const Image& I, const Sinogram& S, const Image& WI, double epsilon_div, StepDiagnostics* diag) {
  if (!(I.grid() == WI.grid())) throw MismatchedShapes("image and white image grids differ");
  return update(I, radon(I, S.geometry(), measured_rays(S)), S, WI, epsilon_div, diag);
}

Image sensitivity_image(const SinogramGeometry& sg, const GridSpec& grid) {
  return back_project(Sinogram(sg, 1.0), grid);
}

ReconResult mlem(const Sinogram& S, const ReconConfig& cfg, const Image* truth) {
  if (cfg.baseline == Baseline::FBP) throw ConfigError("mlem called with the FBP baseline");
  cfg.validate();
  if (truth && !(truth->grid() == cfg.grid)) throw MismatchedShapes("ground truth grid differs");
  const auto rays = measured_rays(S);
  const Image sens = sensitivity_image(S.geometry(), cfg.grid);
  const Image& WI = cfg.baseline == Baseline::Proposed ? *cfg.white_image : sens;
  const std::vector<bool> fov = disk_mask(cfg.grid, cfg.grid.fov_radius);

  ReconResult result{Image(cfg.grid, cfg.init_value), {}, false};
  Sinogram projection = radon(result.image, S.geometry(), rays);
  for (int it = 1; it <= cfg.n_iter; ++it) {
    StepDiagnostics diag;
    result.image = update(result.image, projection, S, WI, cfg.epsilon_div, &diag);
    result.inconsistent_data = result.inconsistent_data || diag.inconsistent_data;
    projection = radon(result.image, S.geometry(), rays);
    TraceRow row;
    row.iter = it;
    row.loglik = loglik(S, projection, result.image, sens, cfg.epsilon_div);
    row.nrmse = truth ? nrmse_scaled(result.image.values(), truth->values(), fov)
                      : std::numeric_limits<double>::quiet_NaN();
    result.trace.push_back(row);
  }
  return result;
}

Image fbp(const Sinogram& S, const GridSpec& grid) {
  const SinogramGeometry& sg = S.geometry();
  grid.validate();
  int n_fft = 1;
  while (n_fft < 2 * sg.n_s) n_fft *= 2;
  const int n_freq = n_fft / 2 + 1;
  const double ds = sg.ds();

  // Spatial Ram-Lak kernel, band-limited at the Nyquist frequency of s.
  std::vector<double> kernel(n_fft, 0.0);
  kernel[0] = 1.0 / (4.0 * ds * ds);
  for (int m = 1; m < n_fft / 2; ++m) {
    if (m % 2 == 0) continue;
    const double v = -1.0 / (std::numbers::pi * std::numbers::pi * m * m * ds * ds);
    kernel[m] = v;
    kernel[n_fft - m] = v;
  }
  std::vector<double> buf(n_fft);
  std::vector<std::complex<double>> spec(n_freq);
  std::vector<std::complex<double>> kspec(n_freq);
  auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan fwd = fftw_plan_dft_r2c_1d(n_fft, buf.data(), cspec, FFTW_ESTIMATE);
  fftw_plan inv = fftw_plan_dft_c2r_1d(n_fft, cspec, buf.data(), FFTW_ESTIMATE);

  std::copy(kernel.begin(), kernel.end(), buf.begin());
  fftw_execute(fwd);
  kspec = spec;

  Sinogram filtered(sg);
  for (int k = 0; k < sg.n_theta; ++k) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int j = 0; j < sg.n_s; ++j) buf[j] = S.at(j, k);
    fftw_execute(fwd);
    for (int f = 0; f < n_freq; ++f) spec[f] *= kspec[f];
    fftw_execute(inv);
    for (int j = 0; j < sg.n_s; ++j) filtered.at(j, k) = buf[j] * ds / n_fft;
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);

  Image out = back_project(filtered, grid);
  const double px = grid.pixel_size();
  const double scale = std::numbers::pi / sg.n_theta * ds / (px * px);
  for (double& v : out.values()) v *= scale;
  return out;
}

Image clamp_nonnegative(const Image& img) {
  Image out = img;
  for (double& v : out.values()) v = std::max(v, 0.0);
  return out;
}

ReconResult reconstruct(const Sinogram& S, const ReconConfig& cfg, const Image* truth) {
  if (cfg.baseline != Baseline::FBP) return mlem(S, cfg, truth);
  ReconResult r{fbp(S, cfg.grid), {}, false};
  if (truth) {
    TraceRow row;
    row.iter = 0;
    row.loglik = std::numeric_limits<double>::quiet_NaN();
    row.nrmse = nrmse_scaled(clamp_nonnegative(r.image).values(), truth->values(), disk_mask(cfg.grid, cfg.grid.fov_radius));
    r.trace.push_back(row);
  }
  return r;
}

}  // namespace wipet
