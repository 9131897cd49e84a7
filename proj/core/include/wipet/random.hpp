#pragma once

#include <cstdint>
#include <random>

namespace wipet {

/// Events are generated in fixed-size blocks; each block owns an independent
/// engine derived from (seed, block index). This makes every stochastic
/// operation independent of scheduling and worker count.
inline constexpr std::size_t kRngBlockSize = 4096;

/// SplitMix64 finalizer, used only to decorrelate block seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class BlockRng {
 public:
  BlockRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
      : engine_(mix64(mix64(seed) ^ mix64(stream * 0x632BE59BD9B4E019ULL + block))) {}

  /// Uniform in [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Stream identifiers keep different consumers of one seed apart.
enum class RngStream : std::uint64_t {
  WhiteImageMc = 1,
  EventSimulation = 2,
  Dither = 3,
  PoissonNoise = 4,
};

}  // namespace wipet
