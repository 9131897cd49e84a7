#include "wipet_cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wipet/error.hpp"
#include "wipet/geometry.hpp"
#include "wipet/io.hpp"
#include "wipet/metrics.hpp"
#include "wipet/parallel.hpp"
#include "wipet/phantom.hpp"
#include "wipet/projection.hpp"
#include "wipet/recon.hpp"
#include "wipet/response.hpp"
#include "wipet/white_image.hpp"
#include "wipet_cli/config.hpp"
#include "wipet_cli/provenance.hpp"

namespace wipet::cli {

namespace fs = std::filesystem;

namespace {

/// Flags shared by every command; applied over the config file.
struct Overrides {
  std::string config;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<double> seed;
  std::optional<int> grid_n;
  std::optional<double> events;
  std::optional<double> mc_events;
  std::optional<int> iterations;
  std::optional<std::string> intersection;
  std::optional<std::string> kind;
  std::optional<std::string> baseline;
  bool mc = false;
  bool mc_white_image = false;
};

std::uint64_t as_count(double v, const std::string& what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 9.0e15) throw ConfigError(what + " must be a positive integer");
  return static_cast<std::uint64_t>(v);
}

class Session {
 public:
  Session(std::string command, const Overrides& o) : command_(std::move(command)) {
    if (!o.config.empty()) merge_config(cfg_, o.config);
    if (o.threads) cfg_.threads = *o.threads;
    if (o.out) cfg_.output_dir = *o.out;
    if (o.seed) {
      if (!(*o.seed >= 0.0) || *o.seed != std::floor(*o.seed)) throw ConfigError("--seed must be a non-negative integer");
      cfg_.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (o.grid_n) cfg_.grid.n = *o.grid_n;
    if (o.events) {
      if (command_ == "white-image") cfg_.mc_events = as_count(*o.events, "--events");
      else cfg_.n_events = as_count(*o.events, "--events");
    }
    if (o.mc_events) cfg_.mc_events = as_count(*o.mc_events, "--mc-events");
    if (o.iterations) cfg_.n_iter = *o.iterations;
    if (o.intersection && *o.intersection != "both") cfg_.scanner.intersection = parse_intersection(*o.intersection);
    if (o.kind) cfg_.phantom.kind = parse_phantom_kind(*o.kind);
    if (o.baseline) {
      cfg_.baselines.clear();
      std::stringstream ss(*o.baseline);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item == "all") {
          cfg_.baselines = {Baseline::Proposed, Baseline::UncompensatedMLEM, Baseline::FBP};
          break;
        }
        cfg_.baselines.push_back(parse_baseline(item));
      }
      if (cfg_.baselines.empty()) throw ConfigError("--baseline: empty list");
    }
    if (o.mc_white_image) cfg_.mc_white_image = true;
    cfg_.finalize();
    set_num_threads(cfg_.threads);
    hash_ = sha256_hex(canonical(cfg_));
  }

  const RunConfig& cfg() const { return cfg_; }
  RunConfig& cfg() { return cfg_; }

  fs::path path(const std::string& name) const { return cfg_.output_dir / name; }

  void provenance(const fs::path& file) const { write_provenance(file, command_, hash_, cfg_.seed); }

  void image(const std::string& base, const Image& img) const {
    const fs::path raw = path(base + ".raw");
    io::write_raw(raw, img);
    provenance(raw);
    const fs::path pgm = path(base + ".pgm");
    io::write_pgm16(pgm, clamp_nonnegative(img));
    provenance(pgm);
    std::cout << "wrote " << raw.string() << " and " << pgm.filename().string() << '\n';
  }

  void csv(const fs::path& file) const {
    provenance(file);
    std::cout << "wrote " << file.string() << '\n';
  }

 private:
  std::string command_;
  RunConfig cfg_;
  std::string hash_;
};

std::vector<IntersectionConfig> intersections(const Overrides& o, const RunConfig& cfg) {
  if (o.intersection && *o.intersection == "both") {
    return {IntersectionConfig::EightActive, IntersectionConfig::FourActive};
  }
  if (o.intersection || !cfg.scanner.active_sectors.empty()) return {cfg.scanner.intersection};
  return {IntersectionConfig::EightActive, IntersectionConfig::FourActive};
}

ScannerGeometry scanner_for(const RunConfig& cfg, IntersectionConfig ic) {
  ScannerConfig sc = cfg.scanner;
  sc.intersection = ic;
  return build_scanner(sc);
}

int cmd_white_image(const Overrides& o) {
  Session s("white-image", o);
  const auto& cfg = s.cfg();
  for (auto ic : intersections(o, cfg)) {
    const auto geom = scanner_for(cfg, ic);
    const auto pairs = enumerate_pairs(geom);
    const std::string tag = "white_" + to_string(ic);
    s.image(tag, white_image_analytic(pairs, cfg.grid));

    const double step = cfg.grid.pixel_size() / 4.0;
    const auto table = white_image_profile(pairs, cfg.grid.radius(0, 0) + step, step);
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < table.values.size(); ++i) rows.emplace_back(static_cast<double>(i) * step, table.values[i]);
    const fs::path profile = s.path(tag + "_profile.csv");
    io::write_profile_csv(profile, rows);
    s.csv(profile);

    if (o.mc) {
      const GridSpec mc_grid{cfg.mc_grid, cfg.grid.fov_radius};
      const auto mc = white_image_mc(geom, mc_grid, cfg.mc_events, cfg.seed);
      if (mc.empty) std::cerr << "warning: no Monte Carlo event was accepted for " << to_string(ic) << '\n';
      s.image(tag + "_mc", mc.image);
      const double err = mc.empty ? std::nan("") : white_image_oracle_nrmse(pairs, mc.image);
      const fs::path report = s.path(tag + "_mc_report.csv");
      io::atomic_write(report, [&](std::ostream& os) {
        os.precision(17);
        os << "n_events,accepted,nrmse\n" << mc.trials << ',' << mc.accepted << ',' << err << '\n';
      });
      s.csv(report);
      std::cout << to_string(ic) << ": MC accepted " << mc.accepted << " of " << mc.trials << ", NRMSE vs analytic "
                << err << '\n';
    }
  }
  return kOk;
}

int cmd_phantom(const Overrides& o) {
  Session s("phantom", o);
  const auto& cfg = s.cfg();
  s.image("phantom_" + std::string(to_string(cfg.phantom.kind)), make_phantom(cfg.phantom, cfg.grid));
  return kOk;
}

int cmd_simulate(const Overrides& o, const std::string& activity_file) {
  Session s("simulate", o);
  const auto& cfg = s.cfg();
  const auto geom = build_scanner(cfg.scanner);
  Image activity = activity_file.empty() ? make_phantom(cfg.phantom, cfg.grid) : io::read_raw_image(activity_file);
  if (!(activity.grid() == cfg.grid)) throw MismatchedShapes("activity image grid differs from the configured grid");
  const auto sim = simulate_events(activity, geom, cfg.n_events, cfg.seed);
  const auto binned = bin_events(sim.events, geom, cfg.sinogram, cfg.seed);

  const fs::path events = s.path("events.csv");
  io::write_events_csv(events, sim.events);
  s.csv(events);
  const fs::path sino = s.path("sinogram.raw");
  io::write_raw(sino, binned.sinogram);
  s.csv(sino);
  s.image("truth", activity);
  const fs::path report = s.path("simulate_report.csv");
  io::atomic_write(report, [&](std::ostream& os) {
    os << "n_events,trials,binned,overflow\n"
       << sim.events.size() << ',' << sim.trials << ',' << binned.binned << ',' << binned.overflow << '\n';
  });
  s.csv(report);
  if (binned.overflow > 0) std::cerr << "warning: " << binned.overflow << " events fell outside s_max\n";
  return kOk;
}

int cmd_reconstruct(const Overrides& o, const std::string& sino_file, const std::string& events_file,
                    const std::string& truth_file) {
  if (sino_file.empty() == events_file.empty()) throw ConfigError("give exactly one of --sinogram or --events");
  Session s("reconstruct", o);
  const auto& cfg = s.cfg();
  const auto geom = build_scanner(cfg.scanner);
  Sinogram S;
  if (!sino_file.empty()) {
    S = io::read_raw_sinogram(sino_file);
  } else {
    const auto binned = bin_events(io::read_events_csv(events_file), geom, cfg.sinogram, cfg.seed);
    if (binned.overflow > 0) std::cerr << "warning: " << binned.overflow << " events fell outside s_max\n";
    S = binned.sinogram;
  }
  std::optional<Image> truth;
  if (!truth_file.empty()) {
    truth = io::read_raw_image(truth_file);
    if (!(truth->grid() == cfg.grid)) throw MismatchedShapes("ground truth grid differs from the configured grid");
  }

  for (Baseline b : cfg.baselines) {
    ReconConfig rc;
    rc.n_iter = cfg.n_iter;
    rc.init_value = cfg.init_value;
    rc.epsilon_div = cfg.epsilon_div;
    rc.baseline = b;
    rc.grid = cfg.grid;
    if (b == Baseline::Proposed) {
      if (cfg.mc_white_image) {
        auto mc = white_image_mc(geom, cfg.grid, cfg.mc_events, cfg.seed);
        if (mc.empty) throw DataError("the Monte Carlo white image is empty");
        rc.white_image = std::move(mc.image);
      } else {
        rc.white_image = white_image_analytic(geom, cfg.grid);
      }
    }
    const auto result = reconstruct(S, rc, truth ? &*truth : nullptr);
    if (result.inconsistent_data) {
      std::cerr << "warning: counts on rays with zero forward projection (" << to_string(b) << ")\n";
    }
    const std::string name = "recon_" + std::string(to_string(b));
    s.image(name, result.image);
    if (b != Baseline::FBP) {
      const fs::path trace = s.path("trace_" + std::string(to_string(b)) + ".csv");
      io::write_trace_csv(trace, result.trace);
      s.csv(trace);
    }
    if (truth && !result.trace.empty()) {
      std::cout << to_string(b) << ": NRMSE vs truth " << result.trace.back().nrmse << '\n';
    }
  }
  return kOk;
}

std::string fmt_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

int cmd_compare_approx(const Overrides& o, const std::string& r0_list, double l0, const std::string& h_list,
                       const std::string& approx_list, double r_step) {
  Session s("compare-approx", o);
  std::vector<Approximation> approxs;
  {
    std::stringstream ss(approx_list);
    std::string item;
    while (std::getline(ss, item, ',')) approxs.push_back(parse_approximation(item));
  }
  if (approxs.empty()) throw ConfigError("--approx: empty list");
  const auto r0s = parse_list(r0_list);
  const auto hs = parse_list(h_list);
  const bool has_exact = std::find(approxs.begin(), approxs.end(), Approximation::Exact) != approxs.end();
  for (double h : hs) {
    if (has_exact && h != 0.0) {
      throw ConfigError("the exact closed form exists only for h = 0; requested profile at h = " + fmt_number(h));
    }
  }
  if (!(r_step > 0.0)) throw ConfigError("--r-step must be positive");
  for (double R0 : r0s) TentParams{R0, l0, 0.0}.validate();

  std::vector<Approximation> rmse_set;
  for (auto a : approxs) {
    if (a != Approximation::Numeric) rmse_set.push_back(a);
  }
  RmseProtocol protocol;
  protocol.r_step = r_step;
  std::vector<RmseTable> all;
  for (double R0 : r0s) {
    if (rmse_set.empty()) break;
    auto tables = rmse_vs_reference(rmse_set, R0, l0, protocol);
    for (auto& t : tables) {
      std::cout << to_string(t.approx) << " R0=" << R0 << " L0=" << l0 << " max RMSE " << t.max_rmse << " at h=" << t.argmax_h
                << '\n';
      all.push_back(std::move(t));
    }
  }
  if (!all.empty()) {
    const fs::path rmse = s.path("rmse.csv");
    io::write_rmse_csv(rmse, all);
    s.csv(rmse);
    const fs::path rows = s.path("rmse_by_h.csv");
    io::atomic_write(rows, [&](std::ostream& os) {
      os.precision(17);
      os << "approx,R0,L0,h,rmse\n";
      for (const auto& t : all) {
        for (const auto& r : t.rows) os << to_string(t.approx) << ',' << t.R0 << ',' << t.L0 << ',' << r.h << ',' << r.rmse << '\n';
      }
    });
    s.csv(rows);
  }

  for (double R0 : r0s) {
    for (double h : hs) {
      std::vector<Approximation> profile_set = approxs;
      if (std::find(profile_set.begin(), profile_set.end(), Approximation::Numeric) == profile_set.end()) {
        profile_set.push_back(Approximation::Numeric);
      }
      for (auto a : profile_set) {
        std::vector<std::pair<double, double>> rows;
        const auto n = static_cast<long>(std::floor(R0 / r_step + 1e-9));
        for (long i = 0; i <= n; ++i) {
          const double r = static_cast<double>(i) * r_step;
          rows.emplace_back(r, rotated_profile(a, r, h, R0, l0));
        }
        const fs::path file =
            s.path("profile_R0_" + fmt_number(R0) + "_h_" + fmt_number(h) + "_" + std::string(to_string(a)) + ".csv");
        io::write_profile_csv(file, rows);
        s.csv(file);
      }
    }
  }
  return kOk;
}

int cmd_bench(const Overrides& o) {
  Session s("bench", o);
  const auto& cfg = s.cfg();
  using clock = std::chrono::steady_clock;
  std::vector<std::pair<std::string, double>> stages;
  auto tick = clock::now();
  auto lap = [&](const std::string& name) {
    const auto now = clock::now();
    stages.emplace_back(name, std::chrono::duration<double>(now - tick).count());
    tick = now;
  };
  const auto geom = build_scanner(cfg.scanner);
  const Image phantom = make_phantom(cfg.phantom, cfg.grid);
  lap("phantom");
  const auto sim = simulate_events(phantom, geom, cfg.n_events, cfg.seed);
  lap("simulate");
  const auto binned = bin_events(sim.events, geom, cfg.sinogram, cfg.seed);
  lap("bin");
  ReconConfig rc;
  rc.n_iter = cfg.n_iter;
  rc.grid = cfg.grid;
  rc.white_image = white_image_analytic(geom, cfg.grid);
  lap("white_image");
  const auto result = mlem(binned.sinogram, rc);
  lap("mlem");
  double total = 0.0;
  for (const auto& [name, t] : stages) total += t;
  stages.emplace_back("total", total);
  const fs::path file = s.path("bench.csv");
  io::atomic_write(file, [&](std::ostream& os) {
    os << "stage,seconds\n";
    for (const auto& [name, t] : stages) os << name << ',' << t << '\n';
  });
  s.csv(file);
  for (const auto& [name, t] : stages) std::cout << name << ' ' << t << " s\n";
  (void)result;
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"White-image compensated MLEM for partial-ring PET"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WIPET_VERSION);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI configuration file");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores); results do not depend on it");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--grid", o.grid_n, "pixels per image side");
  };

  auto* white = app.add_subcommand("white-image", "analytic (and optionally Monte Carlo) white images");
  add_common(white);
  white->add_flag("--mc", o.mc, "also run the Monte Carlo white image and report its NRMSE");
  white->add_option("--events", o.events, "Monte Carlo trials");
  white->add_option("--intersection", o.intersection, "eight|four|both");

  auto* phantom = app.add_subcommand("phantom", "rasterize a phantom");
  add_common(phantom);
  phantom->add_option("--kind", o.kind, "five-rods|two-holes");

  std::string activity_file;
  auto* simulate = app.add_subcommand("simulate", "simulate list-mode events and bin them");
  add_common(simulate);
  simulate->add_option("--kind", o.kind, "phantom: five-rods|two-holes");
  simulate->add_option("--activity", activity_file, "activity image (.raw) instead of a phantom");
  simulate->add_option("--events", o.events, "number of coincidences");
  simulate->add_option("--intersection", o.intersection, "eight|four");

  std::string sino_file;
  std::string events_file;
  std::string truth_file;
  auto* recon = app.add_subcommand("reconstruct", "reconstruct from a sinogram or an event list");
  add_common(recon);
  recon->add_option("--sinogram", sino_file, "sinogram (.raw)");
  recon->add_option("--events", events_file, "event list (.csv)");
  recon->add_option("--truth", truth_file, "ground truth image (.raw) for the NRMSE trace");
  recon->add_option("--baseline", o.baseline, "proposed,uncompensated,fbp or all");
  recon->add_option("--iterations", o.iterations, "MLEM iterations");
  recon->add_option("--intersection", o.intersection, "eight|four");
  recon->add_flag("--mc-white-image", o.mc_white_image, "divide by the Monte Carlo white image");
  recon->add_option("--mc-events", o.mc_events, "Monte Carlo trials for --mc-white-image");

  std::string r0_list = "50,100";
  double l0 = 1.0;
  std::string h_list = "0,1,10";
  std::string approx_list = "dirac,rect,triangle";
  double r_step = 0.1;
  auto* compare = app.add_subcommand("compare-approx", "RMSE of the rotated response approximations");
  add_common(compare);
  compare->set_help_flag("--help", "Print this help message and exit");
  compare->add_option("--r0", r0_list, "half crystal separations, comma separated");
  compare->add_option("--l0", l0, "crystal half-length");
  compare->add_option("--h", h_list, "shifts of the exported profiles");
  compare->add_option("--approx", approx_list, "dirac,rect,triangle,exact,numeric");
  compare->add_option("--r-step", r_step, "radial grid step");

  auto* bench = app.add_subcommand("bench", "time the reconstruction pipeline");
  add_common(bench);
  bench->add_option("--events", o.events, "number of coincidences");
  bench->add_option("--intersection", o.intersection, "eight|four");
  bench->add_option("--kind", o.kind, "five-rods|two-holes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (white->parsed()) return cmd_white_image(o);
    if (phantom->parsed()) return cmd_phantom(o);
    if (simulate->parsed()) return cmd_simulate(o, activity_file);
    if (recon->parsed()) return cmd_reconstruct(o, sino_file, events_file, truth_file);
    if (compare->parsed()) return cmd_compare_approx(o, r0_list, l0, h_list, approx_list, r_step);
    if (bench->parsed()) return cmd_bench(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidGeometry& e) {
    std::cerr << "invalid geometry: " << e.what() << '\n';
    return kConfigError;
  } catch (const NoCoincidencePossible& e) {
    std::cerr << "no coincidences possible: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kDataError;
  }
  return kConfigError;
}

}  // namespace wipet::cli
