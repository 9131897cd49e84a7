#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wipet/geometry.hpp"
#include "wipet/image.hpp"
#include "wipet/phantom.hpp"
#include "wipet/projection.hpp"
#include "wipet/recon.hpp"

namespace wipet::cli {

/// Everything a command needs. Loaded from an INI file with the sections
/// [geometry] [grid] [sinogram] [phantom] [recon] [run]; command-line flags
/// are applied on top.
struct RunConfig {
  ScannerConfig scanner;
  GridSpec grid{256, 0.0};             // fov_radius 0: follow the scanner FOV
  SinogramGeometry sinogram{256, 0.0, 180};  // s_max 0: follow the grid FOV
  PhantomSpec phantom;

  int n_iter = 50;
  double init_value = 1.0;
  double epsilon_div = 1e-12;
  std::vector<Baseline> baselines = {Baseline::Proposed, Baseline::UncompensatedMLEM, Baseline::FBP};
  bool mc_white_image = false;  // divide by the MC white image instead of the analytic one

  std::uint64_t seed = 1;
  std::uint64_t n_events = 50000;
  std::uint64_t mc_events = 10'000'000;
  int mc_grid = 64;  // pixels per side of the MC white image
  unsigned threads = 0;
  std::filesystem::path output_dir = "out";

  /// Resolves the "follow" defaults and validates every section.
  void finalize();
};

/// Reads an INI file; unknown sections or keys are rejected. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Applies an INI file on top of `cfg`.
void merge_config(RunConfig& cfg, const std::filesystem::path& path);

/// Canonical text of the settings that determine results (no thread count,
/// no output directory); hashed into provenance records.
std::string canonical(const RunConfig& cfg);

std::string to_string(IntersectionConfig c);
IntersectionConfig parse_intersection(const std::string& s);

/// Comma-separated numbers.
std::vector<double> parse_list(const std::string& s);

}  // namespace wipet::cli
