#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace zerodist {

// Counter-based random numbers: every draw is a pure function of
// (seed, trial, term, lane), so trials can be generated in any order on any
// thread and still reproduce bit for bit.
namespace rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t trial, std::uint64_t term,
                            std::uint64_t lane) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ (term * 0xD1B54A32D192ED03ULL));
  return splitmix64(h ^ (lane + 0x632BE59BD9B4E019ULL));
}

// Uniform in (0, 1]: top 53 bits, offset by one ulp so log() stays finite.
inline double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard complex Gaussian with density (1/pi) exp(-|a|^2): real and
/// imaginary parts are independent N(0, 1/2), so E|a|^2 = 1.
inline std::complex<double> complex_gaussian(std::uint64_t seed, std::uint64_t trial,
                                             std::uint64_t term) {
  const double u1 = uniform_open(key(seed, trial, term, 0));
  const double u2 = uniform_open(key(seed, trial, term, 1));
  // |a|^2 ~ Exp(1), arg(a) ~ U[0, 2pi)
  const double radius = std::sqrt(-std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Uniform in (0, 1] from an independent stream (used by randomized
/// geometric perturbations in the zero finder).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return uniform_open(key(seed ^ 0xA5A5A5A5A5A5A5A5ULL, stream, index, 7));
}

}  // namespace rng
}  // namespace zerodist
