#pragma once

#include <cstdint>
#include <vector>

namespace mols {

/// Seedable splitmix64 generator. All randomness in the library flows through
/// this so that a fixed seed reproduces every draw bit for bit, independently
/// of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one draw consumes two uniforms.
  double next_gaussian();

  /// Uniform on {0, ..., bound-1}, unbiased.
  std::uint64_t next_below(std::uint64_t bound);

  /// K distinct indices from {0, ..., n-1}, returned strictly increasing.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::uint64_t state_;
};

/// Mixes a master seed with a stream index. Child streams are what trials,
/// noise draws, and worker partitions consume, so scheduling order can never
/// change results.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

}  // namespace mols
