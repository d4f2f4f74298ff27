#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace proxagg {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on u64.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based stream of pseudo-random numbers.
//
// The stream key is a hash of (master seed, stream ids...); output i is a
// stateless mix of (key, i). Identical (seed, ids) reproduce the identical
// sequence bit-for-bit, and distinct ids give statistically independent
// streams, so every Monte Carlo trial can own a private stream that never
// perturbs any other trial's randomness.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed,
                     std::initializer_list<std::uint64_t> stream_ids = {})
      : key_(detail::mix64(master_seed)) {
    for (std::uint64_t id : stream_ids) key_ = detail::mix64(key_ ^ id);
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + counter_++); }

  // Uniform on [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n), n >= 1. Lemire's multiply-shift reduction.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Standard normal via Box-Muller; used only by test helpers that need
// uniform directions on a sphere.
inline double next_gaussian(RngStream& rng) {
  double u1 = rng.next_double();
  while (u1 == 0.0) u1 = rng.next_double();
  const double u2 = rng.next_double();
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace proxagg
