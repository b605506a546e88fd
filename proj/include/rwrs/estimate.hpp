// Probability estimates carry enough context to reproduce the run and do CI
// arithmetic: value, variance, replica count, seed, and estimator identity.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace rwrs {

enum class EstimatorId { kNaive, kTilted, kLowerBound };

inline const char* to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::kNaive: return "naive";
    case EstimatorId::kTilted: return "tilted";
    case EstimatorId::kLowerBound: return "lower-bound";
  }
  return "?";
}

struct TailEstimate {
  double log_p = -std::numeric_limits<double>::infinity();
  double se_log = std::numeric_limits<double>::infinity();  // se(p)/p
  double variance = 0.0;  // variance of the probability-scale estimator
  std::int64_t replicas = 0;
  EstimatorId id = EstimatorId::kNaive;
  std::uint64_t seed = 0;

  double p() const { return std::exp(log_p); }
  double se() const { return std::sqrt(variance); }
};

/// Hit-frequency estimate with binomial variance.
inline TailEstimate binomial_estimate(std::int64_t hits, std::int64_t replicas,
                                      EstimatorId id, std::uint64_t seed) {
  TailEstimate e;
  e.replicas = replicas;
  e.id = id;
  e.seed = seed;
  if (replicas > 0 && hits > 0) {
    double p = static_cast<double>(hits) / static_cast<double>(replicas);
    e.log_p = std::log(p);
    e.variance = p * (1.0 - p) / static_cast<double>(replicas);
    e.se_log = (hits == replicas) ? 0.0 : std::sqrt(e.variance) / p;
  }
  return e;
}

/// Mean-value estimate (for occupation counts and Green-function values).
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
  double truncated_fraction = 0.0;  // replicas the horizon left unresolved
};

}  // namespace rwrs
