#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ganduf {

// Deterministic RNG used everywhere. mt19937_64 supplies the bits; the
// uniform/normal transforms are spelled out here instead of using
// std::*_distribution so that the byte stream of every archive and report is
// stable across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, cosine branch only: two uniforms per draw, no cached state.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * r * std::cos(two_pi * u2);
  }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Independent substream derived from the root seed and an index; the result
  // does not depend on how many draws the parent has made, so work split
  // across indices is reproducible regardless of scheduling.
  Rng substream(std::uint64_t index) const {
    return Rng(splitmix64(root_seed_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  std::uint64_t root_seed() const { return root_seed_; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t root_seed_;
  std::mt19937_64 engine_;
};

}  // namespace ganduf
