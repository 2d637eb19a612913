#ifndef XILAB_RNG_HPP
#define XILAB_RNG_HPP

// Random streams used by every sampler and experiment.
//
// Engine: xoshiro256** (Blackman & Vigna), state filled from a 64-bit seed
// with SplitMix64. Uniforms use the top 53 bits. Normals use the basic
// Box-Muller transform, consuming two uniforms per pair and caching the
// second variate. These choices are part of the reproducibility contract:
// changing any of them changes every experiment output.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace xilab {

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t v) noexcept {
  std::uint64_t s = v;
  return splitmix64_next(s);
}

/// Seed of replication `rep` at grid point `grid` of a run with `master`.
///
///   s0 = mix64(master)
///   s1 = mix64(s0 ^ mix64(grid + 1))
///   seed = mix64(s1 ^ mix64(~(rep + 1)))
///
/// where mix64(v) is one SplitMix64 step from state v.
inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t grid,
                                                  std::uint64_t rep) noexcept {
  const std::uint64_t s0 = mix64(master);
  const std::uint64_t s1 = mix64(s0 ^ mix64(grid + 1));
  return mix64(s1 ^ mix64(~(rep + 1)));
}

/// xoshiro256** engine; satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace xilab

#endif  // XILAB_RNG_HPP
