#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace mobcache {

// Seeds, streams and scalar draws are hand-rolled on top of mt19937_64 so
// that results are bit-identical across standard libraries (the std::
// distribution classes are not pinned by the standard).

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream id from a base seed and one or two indices.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64{splitmix64(seed)};
}

/// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// Exponential draw with the given mean (mean <= 0 yields 0).
inline double exponential(std::mt19937_64& g, double mean) {
  if (mean <= 0.0) return 0.0;
  return -mean * std::log1p(-uniform01(g));
}

/// Uniform index in [0, n). n must be positive.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  auto idx = static_cast<std::size_t>(uniform01(g) * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

/// One draw from an explicit pmf (linear scan; see RequestSampler for the
/// precomputed-CDF version used in tight loops).
inline std::size_t sample_from_pmf(std::span<const double> pmf, std::mt19937_64& g) {
  const double u = uniform01(g);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  return pmf.empty() ? 0 : pmf.size() - 1;
}

}  // namespace mobcache
