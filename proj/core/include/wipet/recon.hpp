#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "wipet/image.hpp"
#include "wipet/projection.hpp"

namespace wipet {

enum class Baseline { Proposed, UncompensatedMLEM, FBP };

std::string_view to_string(Baseline b);
Baseline parse_baseline(std::string_view name);

struct ReconConfig {
  int n_iter = 50;
  double init_value = 1.0;
  double epsilon_div = 1e-12;
  /// Divisor of the proposed update; required for Baseline::Proposed.
  std::optional<Image> white_image;
  Baseline baseline = Baseline::Proposed;
  GridSpec grid;

  void validate() const;
};

struct StepDiagnostics {
  bool inconsistent_data = false;
  std::size_t inconsistent_bins = 0;  // S > 0 on rays with zero forward projection
};

/// One multiplicative update I * R*(S / R(I)) / WI. Ratios with a vanishing
/// projection are 0; pixels where WI < 1e-12 max(WI) are set to 0.
Image mlem_step(const Image& I, const Sinogram& S, const Image& WI, double epsilon_div = 1e-12,
                StepDiagnostics* diag = nullptr);

struct TraceRow {
  int iter = 0;
  double loglik = 0.0;
  double nrmse = 0.0;  // NaN without a ground truth
};

struct ReconResult {
  Image image;
  std::vector<TraceRow> trace;
  bool inconsistent_data = false;
};

/// Back projection of the all-ones sinogram: the classical MLEM sensitivity.
Image sensitivity_image(const SinogramGeometry& sg, const GridSpec& grid);

/// n_iter MLEM steps from the uniform image. The divisor is cfg.white_image
/// for Proposed and sensitivity_image for UncompensatedMLEM. The trace has
/// one row per iteration; nrmse is filled when `truth` is given.
ReconResult mlem(const Sinogram& S, const ReconConfig& cfg, const Image* truth = nullptr);

/// Ram-Lak filtered back-projection. Output is signed; see clamp_nonnegative.
Image fbp(const Sinogram& S, const GridSpec& grid);

Image clamp_nonnegative(const Image& img);

/// Dispatches on cfg.baseline.
ReconResult reconstruct(const Sinogram& S, const ReconConfig& cfg, const Image* truth = nullptr);

}  // namespace wipet
