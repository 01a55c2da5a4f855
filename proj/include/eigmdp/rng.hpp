#pragma once

#include <cstdint>
#include <random>

namespace eigmdp {

/// SplitMix64 step: add the golden-ratio increment, then apply the
/// finalizer. Both stages are bijections on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of replica `replica` under master seed `seed`:
/// mix64(mix64(seed) + replica). Injective in the replica index for a
/// fixed master seed, and independent of how replicas are scheduled.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t replica) noexcept {
  return mix64(mix64(seed) + replica);
}

/// Derives a master seed for a tagged sub-experiment (e.g. one matrix size
/// in a scan) so different sizes never share replica streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + 0x5851f42d4c957f2dULL));
}

/// A single sequential random stream. Not shared between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream substream(std::uint64_t seed, std::uint64_t replica) {
    return RngStream(substream_seed(seed, replica));
  }

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace eigmdp
