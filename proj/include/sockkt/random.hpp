#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "sockkt/vec.hpp"

namespace sockkt {

// Distributions are computed from raw mt19937_64 output rather than the
// <random> distribution classes, whose algorithms differ between standard
// libraries. Reports embed seeds and must replay on any toolchain.

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for sample `k` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  return splitmix64(seed ^ splitmix64(k + 0x51ed270b27ULL));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline long uniform_int(Rng& rng, long lo, long hi) {
  auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng() % span);
}

inline double normal(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec random_gaussian(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (double& c : v) c = normal(rng);
  return v;
}

inline Vec random_unit(Rng& rng, std::size_t dim) {
  for (;;) {
    Vec v = random_gaussian(rng, dim);
    double n = norm(v);
    if (n > 1e-12) return scaled(v, 1.0 / n);
  }
}

/// Uniform point in the unit ball.
inline Vec random_in_ball(Rng& rng, std::size_t dim) {
  Vec v = random_unit(rng, dim);
  double r = std::pow(uniform01(rng), 1.0 / static_cast<double>(dim));
  return scaled(v, r);
}

}  // namespace sockkt
