#pragma once

// Counter-based random number generation.
//
// Every stream is a pair (key, counter). The n-th draw of a stream is
// mix64(key + n * kGolden), i.e. SplitMix64 evaluated at an explicit counter.
// Output depends only on integer arithmetic, so a seeded run produces the same
// bits on every platform. Replicate streams are split from a master seed with
// split_stream(master, index), which hashes the index into a fresh key.
//
// Distribution helpers below deliberately avoid <random> distributions, whose
// algorithms are implementation-defined.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace coopdyn {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng() noexcept = default;
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  friend constexpr bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Independent stream number `index` derived from `master_seed`.
constexpr CounterRng split_stream(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return CounterRng(detail::mix64(master_seed ^ detail::mix64(index + 0xD1B54A32D192ED03ULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(CounterRng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Multiply-high reduction; bias is below 2^-40 for n < 2^24.
inline std::uint64_t uniform_index(CounterRng& rng, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline bool bernoulli(CounterRng& rng, double p) noexcept { return uniform01(rng) < p; }

/// Standard normal via Box-Muller; draws two uniforms per call.
inline double standard_normal(CounterRng& rng) noexcept {
  double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace coopdyn
