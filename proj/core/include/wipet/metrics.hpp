#pragma once

#include <span>
#include <vector>

#include "wipet/image.hpp"

namespace wipet {

/// Pixels whose centre lies within `radius` of the origin (entire pixel
/// inside when `whole_pixel` is set).
std::vector<bool> disk_mask(const GridSpec& grid, double radius, bool whole_pixel = false);

/// RMS difference over the masked entries divided by the reference range
/// (max - min over the same entries). An empty mask selects everything.
double nrmse(std::span<const double> test, std::span<const double> reference, const std::vector<bool>& mask = {});

/// nrmse after scaling `test` by the least-squares factor
/// sum(test * ref) / sum(test^2), so only the shape is compared.
double nrmse_scaled(std::span<const double> test, std::span<const double> reference,
                    const std::vector<bool>& mask = {});

/// Pearson correlation over the masked entries.
double correlation(std::span<const double> a, std::span<const double> b, const std::vector<bool>& mask = {});

/// Poisson log-likelihood sum(S log mu - mu) without the log S! term.
/// Bins with mu < floor contribute -mu when S == 0 and are skipped otherwise.
double poisson_loglik(std::span<const double> counts, std::span<const double> mean, double floor = 1e-12);

}  // namespace wipet
