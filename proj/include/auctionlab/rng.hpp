#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace auctionlab {

/// All randomness in the library flows through this engine, always seeded
/// from an explicit 64-bit seed derived via derive_seed. mt19937_64 seeded
/// with a single value is fully specified by the standard, so streams are
/// reproducible across platforms.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic seed tree: derive_seed(master, i, j, ...) folds each path
/// element into the state. Independent paths give independent streams, and a
/// given (seed, path) always yields the same engine regardless of how many
/// workers the caller spreads instances over.
inline std::uint64_t derive_seed(std::uint64_t seed) { return seed; }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t head, Rest... rest) {
  return derive_seed(splitmix64(seed ^ splitmix64(head)), rest...);
}

template <typename... Path>
Rng make_rng(std::uint64_t seed, Path... path) {
  return Rng(splitmix64(derive_seed(seed, static_cast<std::uint64_t>(path)...)));
}

/// Uniform integer in [0, n). Rejection sampling; independent of any
/// library's distribution implementation so output streams are stable.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

/// Uniform integer in [lo, hi], inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (deterministic; two engine draws per call).
inline double standard_normal(Rng& rng) {
  double u1 = uniform_real01(rng);
  double u2 = uniform_real01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace auctionlab
