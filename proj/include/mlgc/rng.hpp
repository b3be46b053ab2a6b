#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mlgc {

// Scalar sampling on top of std::mt19937_64. The standard distribution
// classes are implementation-defined, so streams produced through them are
// not reproducible across standard libraries; these helpers are.

// Uniform in (0, 1], from the top 53 bits of one engine draw.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Standard normal via Box-Muller; consumes exactly two engine draws.
inline double normal_sample(std::mt19937_64& rng) {
  const double u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform integer in [0, n); n must be positive.
inline int uniform_index(std::mt19937_64& rng, int n) {
  const int i = static_cast<int>(uniform_unit(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace mlgc
