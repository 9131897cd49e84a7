#include <benchmark/benchmark.h>

#include <cmath>

#include "wipet/detector.hpp"
#include "wipet/geometry.hpp"
#include "wipet/phantom.hpp"
#include "wipet/projection.hpp"
#include "wipet/recon.hpp"
#include "wipet/response.hpp"
#include "wipet/white_image.hpp"

using namespace wipet;

namespace {

struct Pipeline {
  ScannerGeometry geom = build_scanner({});
  GridSpec grid{256, 40.0};
  SinogramGeometry sg{256, 40.0, 180};
  Image phantom = make_phantom({}, grid);
  Sinogram sino;
  Image white;

  Pipeline() {
    const auto sim = simulate_events(phantom, geom, 50000, 1);
    sino = bin_events(sim.events, geom, sg, 1).sinogram;
    white = white_image_analytic(geom, grid);
  }
};

const Pipeline& pipeline() {
  static const Pipeline p;
  return p;
}

}  // namespace

static void BM_Radon(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec grid{n, 40.0};
  const SinogramGeometry sg{n, 40.0, 180};
  const Image img = make_phantom({}, grid);
  for (auto _ : state) benchmark::DoNotOptimize(radon(img, sg));
}
BENCHMARK(BM_Radon)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_BackProject(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec grid{n, 40.0};
  const Sinogram sino(SinogramGeometry{n, 40.0, 180}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(back_project(sino, grid));
}
BENCHMARK(BM_BackProject)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MlemStep(benchmark::State& state) {
  const auto& p = pipeline();
  const Image start(p.grid, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mlem_step(start, p.sino, p.white));
}
BENCHMARK(BM_MlemStep)->Unit(benchmark::kMillisecond);

static void BM_Mlem50(benchmark::State& state) {
  const auto& p = pipeline();
  ReconConfig cfg;
  cfg.grid = p.grid;
  cfg.white_image = p.white;
  for (auto _ : state) benchmark::DoNotOptimize(mlem(p.sino, cfg));
}
BENCHMARK(BM_Mlem50)->Unit(benchmark::kSecond)->Iterations(1);

static void BM_TriangleProfile(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotated_triangle(r, 3.0, 50.0, 1.0));
    r = r > 50.0 ? 0.0 : r + 0.0137;
  }
}
BENCHMARK(BM_TriangleProfile);

static void BM_RotatedNumeric(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rotated_numeric(20.0, 3.0, 50.0, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RotatedNumeric)->Arg(1000)->Arg(20000);

static void BM_AnalyticWhiteImage(benchmark::State& state) {
  const auto geom = build_scanner({});
  const GridSpec grid{256, 40.0};
  for (auto _ : state) benchmark::DoNotOptimize(white_image_analytic(geom, grid));
}
BENCHMARK(BM_AnalyticWhiteImage)->Unit(benchmark::kMillisecond);

static void BM_DetectorHit(benchmark::State& state) {
  const DetectorRing ring(build_scanner({}));
  double phi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ring.detect({3.0, -2.0}, {std::cos(phi), std::sin(phi)}));
    phi += 0.001;
  }
}
BENCHMARK(BM_DetectorHit);

static void BM_Simulate(benchmark::State& state) {
  const auto& p = pipeline();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_events(p.phantom, p.geom, 10000, 3));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
