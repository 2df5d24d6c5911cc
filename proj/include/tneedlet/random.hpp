#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tneedlet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of replication r: the (r+1)-th output of a SplitMix64 stream started
/// at master. Independent of how many replications run or in which order.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t replication) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * replication);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

/// Standard normal draw by the Marsaglia polar method (one of each pair is
/// discarded so every call consumes a self-contained run of the stream).
inline double standard_normal(Rng& rng) {
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

}  // namespace tneedlet
