#include "wipet/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "wipet/error.hpp"

namespace wipet::io {

namespace {

void put_le_float(std::ostream& os, double v) {
  const auto f = static_cast<float>(v);
  auto bits = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  char buf[4];
  std::memcpy(buf, &bits, 4);
  os.write(buf, 4);
}

std::vector<double> read_le_floats(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    char buf[4];
    if (!in.read(buf, 4)) throw DataError(path.string() + ": expected " + std::to_string(count) + " float32 values");
    std::uint32_t bits;
    std::memcpy(&bits, buf, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    out[i] = std::bit_cast<float>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError(path.string() + ": trailing data");
  return out;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Sidecar: header line of field names, then one line of values.
std::vector<std::string> read_sidecar(const fs::path& raw, const std::string& expected_header) {
  const fs::path side = sidecar_path(raw);
  std::ifstream in(side);
  if (!in) throw DataError("missing sidecar " + side.string());
  std::string header;
  std::string values;
  std::getline(in, header);
  std::getline(in, values);
  if (header != expected_header) throw DataError(side.string() + ": expected header '" + expected_header + "'");
  auto fields = split(values);
  if (fields.size() != 3) throw DataError(side.string() + ": expected three values");
  return fields;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("cannot parse " + what + " from '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) throw DataError(what + " must be an integer");
  return static_cast<int>(v);
}

std::ostream& fmt(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer, bool binary) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw DataError("cannot write " + tmp.string());
    writer(os);
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp);
      throw DataError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

fs::path sidecar_path(const fs::path& raw) {
  fs::path p = raw;
  p += ".hdr";
  return p;
}

void write_raw(const fs::path& path, const Image& img) {
  atomic_write(path, [&](std::ostream& os) {
    for (double v : img.values()) put_le_float(os, v);
  }, true);
  atomic_write(sidecar_path(path), [&](std::ostream& os) {
    fmt(os) << "width,height,fov_radius\n" << img.n() << ',' << img.n() << ',' << img.grid().fov_radius << '\n';
  });
}

Image read_raw_image(const fs::path& path) {
  const auto f = read_sidecar(path, "width,height,fov_radius");
  const int w = to_int(f[0], "width");
  const int h = to_int(f[1], "height");
  if (w != h) throw DataError("only square images are supported");
  GridSpec grid{w, to_double(f[2], "fov_radius")};
  try {
    grid.validate();
  } catch (const ConfigError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  Image img(grid);
  const auto v = read_le_floats(path, grid.size());
  std::copy(v.begin(), v.end(), img.values().begin());
  return img;
}

void write_raw(const fs::path& path, const Sinogram& sino) {
  const auto& g = sino.geometry();
  atomic_write(path, [&](std::ostream& os) {
    for (double v : sino.values()) put_le_float(os, v);
  }, true);
  atomic_write(sidecar_path(path), [&](std::ostream& os) {
    fmt(os) << "n_s,n_theta,s_max\n" << g.n_s << ',' << g.n_theta << ',' << g.s_max << '\n';
  });
}

Sinogram read_raw_sinogram(const fs::path& path) {
  const auto f = read_sidecar(path, "n_s,n_theta,s_max");
  SinogramGeometry g{to_int(f[0], "n_s"), to_double(f[2], "s_max"), to_int(f[1], "n_theta")};
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  Sinogram s(g);
  const auto v = read_le_floats(path, g.size());
  std::copy(v.begin(), v.end(), s.values().begin());
  return s;
}

void write_pgm16(const fs::path& path, const Image& img) {
  const double lo = img.min();
  const double hi = img.max();
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  atomic_write(path, [&](std::ostream& os) {
    os << "P5\n" << img.n() << ' ' << img.n() << "\n65535\n";
    for (double v : img.values()) {
      const auto q = static_cast<std::uint16_t>(std::lround((v - lo) * scale));
      const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xFF)};
      os.write(bytes, 2);
    }
  }, true);
}

void write_profile_csv(const fs::path& path, const std::vector<std::pair<double, double>>& rows) {
  atomic_write(path, [&](std::ostream& os) {
    fmt(os) << "r,value\n";
    for (const auto& [r, v] : rows) os << r << ',' << v << '\n';
  });
}

void write_rmse_csv(const fs::path& path, const std::vector<RmseTable>& tables) {
  atomic_write(path, [&](std::ostream& os) {
    fmt(os) << "approx,R0,L0,max_rmse\n";
    for (const auto& t : tables) os << to_string(t.approx) << ',' << t.R0 << ',' << t.L0 << ',' << t.max_rmse << '\n';
  });
}

void write_trace_csv(const fs::path& path, const std::vector<TraceRow>& rows) {
  atomic_write(path, [&](std::ostream& os) {
    fmt(os) << "iter,loglik,nrmse\n";
    for (const auto& r : rows) os << r.iter << ',' << r.loglik << ',' << r.nrmse << '\n';
  });
}

void write_events_csv(const fs::path& path, const EventList& events) {
  atomic_write(path, [&](std::ostream& os) {
    fmt(os) << "pair_id,gantry_angle_rad,offset1_mm,offset2_mm\n";
    for (const auto& e : events) {
      os << e.pair_id << ',' << e.gantry_angle << ',';
      if (e.offsets) os << (*e.offsets)[0] << ',' << (*e.offsets)[1];
      else os << ',';
      os << '\n';
    }
  });
}

EventList read_events_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "pair_id,gantry_angle_rad,offset1_mm,offset2_mm") throw DataError(path.string() + ": bad header");
  EventList out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() != 4) throw DataError(where + ": expected 4 fields");
    Event e;
    e.pair_id = to_int(f[0], where + " pair_id");
    e.gantry_angle = to_double(f[1], where + " gantry angle");
    if (!f[2].empty() || !f[3].empty()) {
      e.offsets = std::array<double, 2>{to_double(f[2], where + " offset1"), to_double(f[3], where + " offset2")};
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace wipet::io
