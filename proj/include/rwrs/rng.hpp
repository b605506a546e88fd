// Counter-derived splittable RNG streams for replica-parallel Monte Carlo.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rwrs {

/// SplitMix64 engine (Steele, Lea, Flood 2014; Vigna's fixed-increment form).
/// One 64-bit word of state, passes BigCrush, and cheap enough that every
/// replica can own an independent instance.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Stateless 64-bit finalizer (the SplitMix64 output mix).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the RNG stream of replica r from (seed, r) with no coordination:
/// the starting state is a full avalanche of both words, so streams for
/// distinct replicas land at unrelated points of the SplitMix64 orbit.
inline SplitMix64 replica_stream(std::uint64_t seed, std::uint64_t replica) {
  return SplitMix64(mix64(mix64(seed) ^ mix64(replica ^ 0x5851f42d4c957f2dULL)));
}

/// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in {0, ..., n-1} via Lemire's multiply-shift.
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

/// Standard exponential by inversion.
inline double exponential(SplitMix64& rng) {
  return -std::log1p(-uniform01(rng));
}

/// Standard normal via Marsaglia polar; discards the spare.
inline double normal(SplitMix64& rng) {
  for (;;) {
    double u = 2.0 * uniform01(rng) - 1.0;
    double v = 2.0 * uniform01(rng) - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Gamma(shape, 1) by Marsaglia-Tsang, with the usual shape<1 boost
/// G(a) = G(a+1) * U^{1/a}.
inline double gamma_variate(SplitMix64& rng, double shape) {
  if (shape < 1.0) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    return gamma_variate(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

}  // namespace rwrs
