// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when a criterion fails that is not listed with --known-failures.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wipet/geometry.hpp"
#include "wipet/metrics.hpp"
#include "wipet/parallel.hpp"
#include "wipet/phantom.hpp"
#include "wipet/projection.hpp"
#include "wipet/recon.hpp"
#include "wipet/response.hpp"
#include "wipet/white_image.hpp"
#include "wipet_cli/app.hpp"

using namespace wipet;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(clk::time_point t) { return std::chrono::duration<double>(clk::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Outcome table_reproduction() {
  const auto t0 = clk::now();
  struct Target {
    double R0;
    Approximation approx;
    double value;
  };
  const Target targets[] = {
      {50.0, Approximation::Dirac, 2.39e-4},   {50.0, Approximation::Rect, 3.45e-5},
      {50.0, Approximation::Triangle, 8.38e-7}, {100.0, Approximation::Dirac, 5.87e-5},
      {100.0, Approximation::Rect, 8.58e-6},   {100.0, Approximation::Triangle, 7.25e-7},
  };
  const std::vector<Approximation> set = {Approximation::Dirac, Approximation::Rect, Approximation::Triangle};
  std::vector<RmseTable> tables;
  for (double R0 : {50.0, 100.0}) {
    for (auto& t : rmse_vs_reference(set, R0, 1.0)) tables.push_back(std::move(t));
  }
  auto lookup = [&](double R0, Approximation a) {
    for (const auto& t : tables) {
      if (t.R0 == R0 && t.approx == a) return t.max_rmse;
    }
    return std::nan("");
  };
  bool factor = true;
  std::ostringstream os;
  for (const auto& t : targets) {
    const double v = lookup(t.R0, t.approx);
    const bool ok = v >= t.value / 2.0 && v <= t.value * 2.0;
    factor = factor && ok;
    os << fmt(" %s/%g=%.3g(%s)", std::string(to_string(t.approx)).c_str(), t.R0, v, ok ? "ok" : "x2 off");
  }
  bool order = true;
  for (double R0 : {50.0, 100.0}) {
    order = order && lookup(R0, Approximation::Dirac) > lookup(R0, Approximation::Rect) &&
            lookup(R0, Approximation::Rect) > lookup(R0, Approximation::Triangle);
  }
  const bool r0_relation = lookup(100.0, Approximation::Triangle) < lookup(50.0, Approximation::Triangle);
  const double secs = seconds_since(t0);
  return {factor && order && r0_relation && secs < 120.0,
          fmt("factor-2 %s, ordering %s, R0 relation %s, %.1f s;", factor ? "ok" : "FAILED", order ? "ok" : "FAILED",
              r0_relation ? "ok" : "FAILED", secs) +
              os.str()};
}

Outcome closed_form() {
  double worst = 0.0;
  for (auto [R0, L0] : {std::pair{50.0, 10.0}, {50.0, 1.0}, {100.0, 1.0}}) {
    const int n = 2000;
    std::vector<double> exact(n + 1);
    std::vector<double> numeric(n + 1);
    double peak = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double r = R0 * i / n;
      exact[i] = rotated_exact(r, R0, L0);
      numeric[i] = rotated_numeric(r, 0.0, R0, L0);
      peak = std::max(peak, std::abs(exact[i]));
    }
    for (int i = 0; i <= n; ++i) {
      const double r = R0 * i / n;
      if (std::abs(r - L0) <= 1e-3 * R0 || std::abs(r - R0) <= 1e-3 * R0) continue;
      worst = std::max(worst, std::abs(exact[i] - numeric[i]) / peak);
    }
  }
  return {worst <= 1e-5, fmt("max relative deviation %.2e (limit 1e-5)", worst)};
}

Outcome normalization() {
  double worst_tent = 0.0;
  for (auto [R0, L0, h] : {std::tuple{50.0, 10.0, 0.0}, {50.0, 1.0, 0.0}, {100.0, 1.0, 0.0}, {50.0, 1.0, 5.0}}) {
    const TentParams p{R0, L0, h};
    auto row = [&](double x) {
      const double k = L0 / R0 * std::abs(x);
      return oracle::integrate([&](double y) { return tent_pdf(x, y, p); }, h - L0, h + L0, {h - k, h, h + k}, 1e-10);
    };
    worst_tent = std::max(worst_tent, std::abs(oracle::integrate(row, -R0, R0, {0.0}, 1e-9) - 1.0));
  }
  auto mass = [](const std::function<double(double)>& P, double r_max, std::vector<double> cuts) {
    return oracle::integrate([&](double r) { return 2.0 * oracle::pi * r * P(r); }, 0.0, r_max, std::move(cuts), 1e-8);
  };
  double worst_profile = 0.0;
  for (auto [R0, L0] : {std::pair{50.0, 10.0}, {50.0, 1.0}, {100.0, 1.0}}) {
    worst_profile = std::max(worst_profile,
                             std::abs(mass([&](double r) { return rotated_exact(r, R0, L0); }, std::hypot(R0, L0), {L0, R0}) - 1.0));
    worst_profile = std::max(
        worst_profile,
        std::abs(mass([&](double r) { return rotated_numeric(r, 0.0, R0, L0, 4000); }, std::hypot(R0, L0), {L0, R0}) - 1.0));
  }
  worst_profile = std::max(worst_profile,
                           std::abs(mass([](double r) { return rotated_numeric(r, 3.0, 50.0, 1.0, 4000); },
                                         std::hypot(50.0, 4.0), {2.0, 3.0, 4.0, 50.0}) -
                                    1.0));
  // window approximations: mass over r <= R0
  for (double R0 : {50.0, 100.0}) {
    worst_profile = std::max(worst_profile, std::abs(mass([&](double r) { return rotated_triangle(r, 0.0, R0, 1.0); }, R0, {1.0}) - 1.0));
    worst_profile = std::max(worst_profile, std::abs(mass([&](double r) { return rotated_rect(r, 0.0, R0, 1.0); }, R0, {1.0}) - 1.0));
  }
  return {worst_tent <= 1e-6 && worst_profile <= 1e-4,
          fmt("tent |mass-1| %.1e (limit 1e-6), rotated profiles |mass-1| %.1e (limit 1e-4)", worst_tent, worst_profile)};
}

Outcome adjointness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridSpec grid{128, 40.0};
  const SinogramGeometry sg{128, 40.0, 180};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Image x(grid);
    for (double& v : x.values()) v = u(rng);
    Sinogram y(sg);
    for (double& v : y.values()) v = u(rng);
    const double lhs = dot(radon(x, sg).values(), y.values());
    const double rhs = dot(x.values(), back_project(y, grid).values());
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
  }
  return {worst <= 1e-10, fmt("max relative deviation %.1e over 20 pairs (limit 1e-10)", worst)};
}

Outcome fixed_point_and_monotonicity() {
  const GridSpec grid{256, 40.0};
  const SinogramGeometry sg{256, 40.0, 180};
  PhantomSpec spec;
  spec.kind = PhantomKind::TwoHoles;
  const Image truth = make_phantom(spec, grid);
  const Image next = mlem_step(truth, radon(truth, sg), sensitivity_image(sg, grid));
  double fixed = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) fixed = std::max(fixed, std::abs(next[i] - truth[i]));
  fixed /= truth.max();

  const auto geom = build_scanner({});
  const auto sim = simulate_events(make_phantom(PhantomSpec{}, grid), geom, 50000, 1);
  const Sinogram S = bin_events(sim.events, geom, sg, 1).sinogram;
  ReconConfig cfg;
  cfg.grid = grid;
  cfg.baseline = Baseline::UncompensatedMLEM;
  const auto r = mlem(S, cfg);
  double worst_drop = 0.0;
  double min_gain = INFINITY;
  bool monotone = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const double drop = r.trace[i - 1].loglik - r.trace[i].loglik;
    worst_drop = std::max(worst_drop, drop / std::abs(r.trace[i - 1].loglik));
    min_gain = std::min(min_gain, -drop);
    if (drop > 1e-9 * std::abs(r.trace[i - 1].loglik)) monotone = false;
  }
  return {fixed <= 1e-10 && monotone && r.trace.size() == 50,
          fmt("fixed point deviation %.1e (limit 1e-10); log-likelihood over %zu iterations, smallest gain %.3g, "
              "largest relative drop %.1e (slack 1e-9)",
              fixed, r.trace.size(), min_gain, worst_drop)};
}

Outcome white_image_oracle() {
  const auto geom = build_scanner({});
  const auto pairs = enumerate_pairs(geom);
  const GridSpec grid{64, geom.fov_radius};
  std::vector<double> errs;
  for (std::uint64_t n : {100000ull, 1000000ull, 10000000ull}) {
    errs.push_back(white_image_oracle_nrmse(pairs, white_image_mc(geom, grid, n, 1).image));
  }
  const bool decreasing = errs[1] < errs[0] && errs[2] < errs[1];
  return {errs[2] < 0.05 && decreasing,
          fmt("NRMSE %.4f / %.4f / %.4f at 1e5 / 1e6 / 1e7 events (limit 0.05 at 1e7, decreasing %s)", errs[0], errs[1],
              errs[2], decreasing ? "yes" : "NO")};
}

struct Quality {
  Outcome outcome;
  double recon_seconds = 0.0;
};

Quality end_to_end(std::uint64_t seed) {
  const GridSpec grid{256, 40.0};
  const SinogramGeometry sg{256, 40.0, 180};
  const auto mask = disk_mask(grid, grid.fov_radius);
  bool ok = true;
  std::ostringstream os;
  double slowest = 0.0;
  for (auto inter : {IntersectionConfig::EightActive, IntersectionConfig::FourActive}) {
    ScannerConfig sc;
    sc.intersection = inter;
    const auto geom = build_scanner(sc);
    for (auto kind : {PhantomKind::FiveRods, PhantomKind::TwoHoles}) {
      PhantomSpec spec;
      spec.kind = kind;
      const Image truth = make_phantom(spec, grid);
      const auto sim = simulate_events(truth, geom, 50000, seed);

      const auto t0 = clk::now();
      const Sinogram S = bin_events(sim.events, geom, sg, seed).sinogram;
      ReconConfig cfg;
      cfg.grid = grid;
      cfg.white_image = white_image_analytic(geom, grid);
      const auto proposed = mlem(S, cfg, &truth);
      slowest = std::max(slowest, seconds_since(t0));

      cfg.baseline = Baseline::UncompensatedMLEM;
      const auto unc = mlem(S, cfg, &truth);
      cfg.baseline = Baseline::FBP;
      const auto filtered = reconstruct(S, cfg, &truth);
      const double p = proposed.trace.back().nrmse;
      const double m = unc.trace.back().nrmse;
      const double f = filtered.trace.back().nrmse;
      const bool beats = p < m && p < f;
      ok = ok && beats;
      const bool four = inter == IntersectionConfig::FourActive;
      os << fmt(" %s/%s: proposed %.4f unc %.4f fbp %.4f%s;", four ? "four" : "eight",
                std::string(to_string(kind)).c_str(), p, m, f, beats ? "" : " (NOT best)");
      if (four) {
        const double c_wi = correlation(unc.image.values(), cfg.white_image->values(), mask);
        const double c_truth = correlation(unc.image.values(), truth.values(), mask);
        if (kind == PhantomKind::TwoHoles) {
          const bool follows = c_wi > c_truth;
          ok = ok && follows;
          os << fmt(" unc corr WI %.3f vs truth %.3f%s;", c_wi, c_truth, follows ? "" : " (NOT WI-dominated)");
        } else {
          os << fmt(" unc corr WI %.3f vs truth %.3f (informational);", c_wi, c_truth);
        }
      }
    }
  }
  return {{ok, fmt("seed %llu:", static_cast<unsigned long long>(seed)) + os.str()}, slowest};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wipet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return cli::run(static_cast<int>(args.size()), argv.data());
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("wipet_acceptance_" + std::to_string(std::random_device{}()));
  const std::vector<std::vector<std::string>> commands = {
      {"phantom", "--kind", "two-holes"},
      {"white-image", "--mc", "--events", "300000", "--grid", "128"},
      {"simulate", "--events", "20000", "--intersection", "four", "--seed", "5"},
      {"compare-approx", "--r0", "50", "--h", "0,2", "--r-step", "0.5"},
  };
  struct Run {
    std::string label;
    unsigned threads;
  };
  const Run runs[] = {{"a", 1}, {"b", 1}, {"c", 4}};
  bool ok = true;
  for (const auto& run : runs) {
    const fs::path dir = root / run.label;
    for (auto cmd : commands) {
      cmd.insert(cmd.end(), {"--threads", std::to_string(run.threads), "--out", dir.string()});
      ok = ok && run_cli(cmd) == 0;
    }
    std::vector<std::string> recon = {"reconstruct", "--events", (root / "a" / "events.csv").string(), "--truth",
                                      (root / "a" / "truth.raw").string(), "--intersection", "four",
                                      "--iterations", "10", "--baseline", "all", "--seed", "5",
                                      "--threads", std::to_string(run.threads), "--out", dir.string()};
    ok = ok && run_cli(recon) == 0;
  }
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const auto name = e.path().filename();
    ++files;
    const std::string ref = slurp(e.path());
    for (const char* other : {"b", "c"}) {
      if (!fs::exists(root / other / name) || slurp(root / other / name) != ref) {
        differing.push_back(std::string(other) + "/" + name.string());
      }
    }
  }
  fs::remove_all(root);
  ok = ok && differing.empty() && files > 0;
  std::string detail = fmt("%zu files compared across two runs at --threads 1 and one at --threads 4", files);
  if (!differing.empty()) detail += "; differing: " + differing.front();
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> known;
  std::vector<int> only;
  std::uint64_t seed = 1;
  app.add_option("--known-failures", known, "criteria allowed to fail")->delimiter(',');
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--seed", seed, "seed of the end-to-end runs");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> tolerated(known.begin(), known.end());
  const std::set<int> selected(only.begin(), only.end());

  Quality quality;
  bool have_quality = false;
  auto quality_run = [&]() -> const Quality& {
    if (!have_quality) {
      quality = end_to_end(seed);
      have_quality = true;
    }
    return quality;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"table reproduction", table_reproduction},
      {"closed form vs oracle", closed_form},
      {"normalization", normalization},
      {"adjointness", adjointness},
      {"MLEM fixed point and monotonicity", fixed_point_and_monotonicity},
      {"white image oracle agreement", white_image_oracle},
      {"end-to-end quality", [&] { return quality_run().outcome; }},
      {"performance",
       [&] {
         const double s = quality_run().recon_seconds;
         return Outcome{s <= 10.0, fmt("slowest 256x256 / 50-iteration reconstruction from 50k events: %.2f s "
                                       "(binning, white image and MLEM; budget 10 s, %u threads)",
                                       s, num_threads())};
       }},
      {"determinism", determinism},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = clk::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected = o.pass || tolerated.count(id);
    if (!expected) ++unexpected;
    std::printf("%s criterion %d (%s): %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0), !o.pass && tolerated.count(id) ? " (known failure)" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
