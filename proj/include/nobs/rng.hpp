#pragma once

#include <cmath>
#include <cstdint>

namespace nobs {

// Counter-based deterministic generator: every draw is a pure function of
// (seed, stream, counter), so records can be generated in any order or in
// parallel and still produce identical bytes.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

// Uniform in (0, 1): top 53 bits, offset by half an ulp so 0 never appears.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (static_cast<double>(hash3(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                      double lo, double hi) {
  return lo + (hi - lo) * uniform01(seed, stream, counter);
}

// Standard normal via Box-Muller on two counter slots (2*counter, 2*counter+1).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  double u1 = uniform01(seed, stream, 2 * counter);
  double u2 = uniform01(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng
}  // namespace nobs
