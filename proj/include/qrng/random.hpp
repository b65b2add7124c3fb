#pragma once

#include <cstdint>
#include <random>

namespace qrng {

/// SplitMix64 finalizer; used to decorrelate seeds of neighbouring substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` derived from a master seed:
///   splitmix64(splitmix64(master) ^ splitmix64(index + 1)).
/// Monte-Carlo batches are cut into fixed-size chunks and chunk k always uses
/// substream k, so results do not depend on how many workers run the chunks.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

/// Explicit random-stream handle passed to every stochastic operation.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(substream_seed(master, index));
  }

  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  double normal(double mean, double stddev) {
    if (stddev == 0.0) return mean;
    return mean + stddev * standard_normal();
  }

  double standard_normal() { return normal_(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qrng
