#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wipet/geometry.hpp"
#include "wipet/image.hpp"

namespace wipet {

/// Radial density sampled on r = 0, step, 2 step, ...; linear interpolation
/// in between, zero beyond the last sample.
struct RadialProfile {
  double step = 0.0;
  std::vector<double> values;

  static RadialProfile tabulate(const std::function<double(double)>& fn, double r_max, double step);
  double operator()(double r) const;
  double r_max() const { return step * static_cast<double>(values.empty() ? 0 : values.size() - 1); }
};

/// Evaluates `profile` once per distinct pixel-centre radius.
Image rasterize_radial(const std::function<double(double)>& profile, const GridSpec& grid);
/// Linear interpolation in a tabulated profile.
Image rasterize_radial(const RadialProfile& table, const GridSpec& grid);

/// Analytic white image as a function of radius,
///   I(r) = sum_ij w_ij P_tri(r; h_ij, R_ij, L_ij) / (N_p sum_ij w_ij).
double white_image_value(const std::vector<PairGeometry>& pairs, double r);

/// Table of I(r) on [0, r_max].
RadialProfile white_image_profile(const std::vector<PairGeometry>& pairs, double r_max, double step);

Image white_image_analytic(const ScannerGeometry& geom, const GridSpec& grid);
Image white_image_analytic(const std::vector<PairGeometry>& pairs, const GridSpec& grid);

struct McWhiteImage {
  Image image;  // accepted annihilation points per pixel, normalised to unit sum
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  bool empty = false;  // no event was accepted; image is all zeros
};

/// Monte Carlo white image: uniform annihilations over the FOV disk, uniform
/// gantry angle and emission direction; a trial is accepted when both photons
/// hit a crystal.
McWhiteImage white_image_mc(const ScannerGeometry& geom, const GridSpec& grid, std::uint64_t n_events,
                            std::uint64_t seed);

/// Shape agreement of a Monte Carlo white image with the analytic model: the
/// analytic image is computed `oversample` times finer and block-averaged to
/// the MC pixels, both are normalised to unit sum over the pixels lying
/// entirely inside the FOV disk, and the NRMSE over those pixels is returned.
double white_image_oracle_nrmse(const std::vector<PairGeometry>& pairs, const Image& mc, int oversample = 4);

/// Pixels whose value is below 1e-12 of the maximum are outside the
/// sensitivity region.
std::vector<bool> sensitivity_mask(const Image& white_image, double relative_floor = 1e-12);

}  // namespace wipet
