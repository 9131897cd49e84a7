#include "wipet_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "wipet/error.hpp"

namespace wipet::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + raw + "'");
}

long long to_integer(const std::string& key, const std::string& raw) {
  const double v = to_double(key, raw);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return static_cast<long long>(v);
}

int to_int(const std::string& key, const std::string& raw) {
  const auto v = to_integer(key, raw);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) throw ConfigError(key + ": out of range");
  return static_cast<int>(v);
}

std::uint64_t to_count(const std::string& key, const std::string& raw) {
  const auto v = to_integer(key, raw);
  if (v < 0) throw ConfigError(key + ": must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  for (double v : parse_list(raw)) {
    if (v != std::floor(v)) throw ConfigError(key + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<Baseline> to_baselines(const std::string& raw) {
  std::vector<Baseline> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "all") return {Baseline::Proposed, Baseline::UncompensatedMLEM, Baseline::FBP};
    out.push_back(parse_baseline(item));
  }
  if (out.empty()) throw ConfigError("recon.baseline: empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"geometry",
       {
           {"sector_slots", [](RunConfig& c, const std::string& v) { c.scanner.sector_slots = to_int("geometry.sector_slots", v); }},
           {"active_sectors", [](RunConfig& c, const std::string& v) { c.scanner.active_sectors = to_int_list("geometry.active_sectors", v); }},
           {"intersection", [](RunConfig& c, const std::string& v) { c.scanner.intersection = parse_intersection(trim(v)); }},
           {"crystals_per_sector", [](RunConfig& c, const std::string& v) { c.scanner.crystals_per_sector = to_int("geometry.crystals_per_sector", v); }},
           {"crystal_pitch", [](RunConfig& c, const std::string& v) { c.scanner.crystal_pitch = to_double("geometry.crystal_pitch", v); }},
           {"crystal_length", [](RunConfig& c, const std::string& v) { c.scanner.crystal_length = to_double("geometry.crystal_length", v); }},
           {"ring_radii", [](RunConfig& c, const std::string& v) { c.scanner.ring_radii = parse_list(v); }},
           {"fov_radius", [](RunConfig& c, const std::string& v) { c.scanner.fov_radius = to_double("geometry.fov_radius", v); }},
           {"first_sector_angle", [](RunConfig& c, const std::string& v) { c.scanner.first_sector_angle = to_double("geometry.first_sector_angle", v); }},
       }},
      {"grid",
       {
           {"n", [](RunConfig& c, const std::string& v) { c.grid.n = to_int("grid.n", v); }},
           {"fov_radius", [](RunConfig& c, const std::string& v) { c.grid.fov_radius = to_double("grid.fov_radius", v); }},
       }},
      {"sinogram",
       {
           {"n_s", [](RunConfig& c, const std::string& v) { c.sinogram.n_s = to_int("sinogram.n_s", v); }},
           {"n_theta", [](RunConfig& c, const std::string& v) { c.sinogram.n_theta = to_int("sinogram.n_theta", v); }},
           {"s_max", [](RunConfig& c, const std::string& v) { c.sinogram.s_max = to_double("sinogram.s_max", v); }},
       }},
      {"phantom",
       {
           {"kind", [](RunConfig& c, const std::string& v) { c.phantom.kind = parse_phantom_kind(trim(v)); }},
           {"body_radius", [](RunConfig& c, const std::string& v) { c.phantom.body_radius = to_double("phantom.body_radius", v); }},
           {"rod_diameters", [](RunConfig& c, const std::string& v) { c.phantom.rod_diameters = parse_list(v); }},
           {"rod_ring_radius", [](RunConfig& c, const std::string& v) { c.phantom.rod_ring_radius = to_double("phantom.rod_ring_radius", v); }},
           {"hole_diameters", [](RunConfig& c, const std::string& v) { c.phantom.hole_diameters = parse_list(v); }},
           {"hole_offset", [](RunConfig& c, const std::string& v) { c.phantom.hole_offset = to_double("phantom.hole_offset", v); }},
           {"activity", [](RunConfig& c, const std::string& v) { c.phantom.activity = to_double("phantom.activity", v); }},
       }},
      {"recon",
       {
           {"n_iter", [](RunConfig& c, const std::string& v) { c.n_iter = to_int("recon.n_iter", v); }},
           {"init_value", [](RunConfig& c, const std::string& v) { c.init_value = to_double("recon.init_value", v); }},
           {"epsilon_div", [](RunConfig& c, const std::string& v) { c.epsilon_div = to_double("recon.epsilon_div", v); }},
           {"baseline", [](RunConfig& c, const std::string& v) { c.baselines = to_baselines(v); }},
           {"mc_white_image", [](RunConfig& c, const std::string& v) { c.mc_white_image = to_bool("recon.mc_white_image", v); }},
       }},
      {"run",
       {
           {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_count("run.seed", v); }},
           {"n_events", [](RunConfig& c, const std::string& v) { c.n_events = to_count("run.n_events", v); }},
           {"mc_events", [](RunConfig& c, const std::string& v) { c.mc_events = to_count("run.mc_events", v); }},
           {"mc_grid", [](RunConfig& c, const std::string& v) { c.mc_grid = to_int("run.mc_grid", v); }},
           {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(to_count("run.threads", v)); }},
           {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); }},
       }},
  };
  return table;
}

template <typename T>
void join(std::ostream& os, const std::vector<T>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
}

}  // namespace

std::string to_string(IntersectionConfig c) { return c == IntersectionConfig::EightActive ? "eight" : "four"; }

IntersectionConfig parse_intersection(const std::string& s) {
  if (s == "eight" || s == "EightActive") return IntersectionConfig::EightActive;
  if (s == "four" || s == "FourActive") return IntersectionConfig::FourActive;
  throw ConfigError("unknown intersection '" + s + "' (eight|four)");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double("list item", item));
  }
  return out;
}

void merge_config(RunConfig& cfg, const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  const auto& table = schema();
  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) throw ConfigError(path.string() + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError(path.string() + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) throw ConfigError(path.string() + ": unknown key " + section + "." + key);
      setter->second(cfg, value.data());
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  merge_config(cfg, path);
  return cfg;
}

void RunConfig::finalize() {
  if (grid.fov_radius == 0.0) grid.fov_radius = scanner.fov_radius;
  if (sinogram.s_max == 0.0) sinogram.s_max = grid.fov_radius;
  grid.validate();
  sinogram.validate();
  if (grid.fov_radius > scanner.fov_radius) throw ConfigError("grid.fov_radius exceeds geometry.fov_radius");
  if (sinogram.s_max < grid.fov_radius) throw ConfigError("sinogram.s_max must be >= grid.fov_radius");
  if (n_iter < 1) throw ConfigError("recon.n_iter must be >= 1");
  if (!(init_value > 0.0)) throw ConfigError("recon.init_value must be positive");
  if (!(epsilon_div > 0.0)) throw ConfigError("recon.epsilon_div must be positive");
  if (n_events < 1) throw ConfigError("run.n_events must be >= 1");
  if (mc_events < 1) throw ConfigError("run.mc_events must be >= 1");
  if (mc_grid < 2) throw ConfigError("run.mc_grid must be >= 2");
}

std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const auto& g = c.scanner;
  os << "geometry.sector_slots=" << g.sector_slots << '\n' << "geometry.active_sectors=";
  join(os, g.active_sectors);
  os << "\ngeometry.intersection=" << to_string(g.intersection) << '\n'
     << "geometry.crystals_per_sector=" << g.crystals_per_sector << '\n'
     << "geometry.crystal_pitch=" << g.crystal_pitch << '\n'
     << "geometry.crystal_length=" << g.crystal_length << '\n'
     << "geometry.ring_radii=";
  join(os, g.ring_radii);
  os << "\ngeometry.fov_radius=" << g.fov_radius << '\n'
     << "geometry.first_sector_angle=" << g.first_sector_angle << '\n'
     << "grid.n=" << c.grid.n << '\n'
     << "grid.fov_radius=" << c.grid.fov_radius << '\n'
     << "sinogram.n_s=" << c.sinogram.n_s << '\n'
     << "sinogram.n_theta=" << c.sinogram.n_theta << '\n'
     << "sinogram.s_max=" << c.sinogram.s_max << '\n'
     << "phantom.kind=" << wipet::to_string(c.phantom.kind) << '\n'
     << "phantom.body_radius=" << c.phantom.body_radius << '\n'
     << "phantom.rod_diameters=";
  join(os, c.phantom.rod_diameters);
  os << "\nphantom.rod_ring_radius=" << c.phantom.rod_ring_radius << '\n' << "phantom.hole_diameters=";
  join(os, c.phantom.hole_diameters);
  os << "\nphantom.hole_offset=" << c.phantom.hole_offset << '\n'
     << "phantom.activity=" << c.phantom.activity << '\n'
     << "recon.n_iter=" << c.n_iter << '\n'
     << "recon.init_value=" << c.init_value << '\n'
     << "recon.epsilon_div=" << c.epsilon_div << '\n'
     << "recon.baseline=";
  for (std::size_t i = 0; i < c.baselines.size(); ++i) os << (i ? "," : "") << wipet::to_string(c.baselines[i]);
  os << "\nrecon.mc_white_image=" << c.mc_white_image << '\n'
     << "run.seed=" << c.seed << '\n'
     << "run.n_events=" << c.n_events << '\n'
     << "run.mc_events=" << c.mc_events << '\n'
     << "run.mc_grid=" << c.mc_grid << '\n';
  return os.str();
}

}  // namespace wipet::cli
