#pragma once

#include <cstdint>

namespace dioph {

/// Counter-based generator: the k-th draw of stream `seed` is a pure function
/// of (seed, k), so disjoint index ranges can be sampled on any thread and
/// still reproduce the sequential result bit for bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// SplitMix64 finalizer applied to seed ⊕ golden·(counter+1).
  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ ^ (0x9E3779B97F4A7C15ULL * (counter + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    // A second round decorrelates nearby seeds.
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  [[nodiscard]] double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace dioph
