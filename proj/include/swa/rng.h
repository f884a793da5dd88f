#pragma once

#include <cstdint>
#include <random>

namespace swa {

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Seed of an independent sub-stream `stream` under `parent`.
constexpr std::uint64_t derive_stream_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64_mix(splitmix64_mix(parent) + kGoldenGamma * (stream + 1));
}

/// mt19937_64 with a platform-independent mapping to [0, 1).
///
/// std::uniform_real_distribution is implementation-defined, so draws are
/// built from the top 53 bits directly to keep result files byte-identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace swa
