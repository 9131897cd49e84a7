#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "wipet/image.hpp"
#include "wipet/projection.hpp"
#include "wipet/recon.hpp"
#include "wipet/response.hpp"

namespace wipet::io {

namespace fs = std::filesystem;

/// Writes through `path`.tmp and renames over `path`, so readers never see a
/// partial file. Throws DataError on failure.
void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer, bool binary = false);

/// Sidecar of a raw file: `<path>.hdr`.
fs::path sidecar_path(const fs::path& raw);

/// Little-endian float32, row-major; sidecar `width,height,fov_radius`.
void write_raw(const fs::path& path, const Image& img);
Image read_raw_image(const fs::path& path);

/// Little-endian float32, angle-major; sidecar `n_s,n_theta,s_max`.
void write_raw(const fs::path& path, const Sinogram& sino);
Sinogram read_raw_sinogram(const fs::path& path);

/// 16-bit binary PGM, min-max scaled to 0..65535.
void write_pgm16(const fs::path& path, const Image& img);

/// CSV `r,value`.
void write_profile_csv(const fs::path& path, const std::vector<std::pair<double, double>>& rows);

/// CSV `approx,R0,L0,max_rmse`.
void write_rmse_csv(const fs::path& path, const std::vector<RmseTable>& tables);

/// CSV `iter,loglik,nrmse`.
void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& rows);

/// CSV `pair_id,gantry_angle_rad,offset1_mm,offset2_mm`; empty offset
/// fields mean "not recorded".
void write_events_csv(const fs::path& path, const EventList& events);
EventList read_events_csv(const fs::path& path);

}  // namespace wipet::io
