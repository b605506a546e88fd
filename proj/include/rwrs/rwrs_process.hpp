// Assembles X_n = sum_x l_n(x) eta(x) from walk and scenery, plus the
// mean-square scaling diagnostics.
#pragma once

#include <cstdint>
#include <vector>

#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

/// One realized (walk, scenery) pair. scenery_values is aligned with
/// local_times.entries(); x_n is their exact weighted sum.
struct RwrsSample {
  LocalTimeField local_times;
  std::vector<double> scenery_values;
  double x_n = 0.0;
};

/// Exact weighted sum over the field's support, Neumaier-compensated in
/// first-visit order.
double evaluate_x(const LocalTimeField& lt, SceneryField& scenery);

/// Compensated sum of count * value over parallel arrays.
double weighted_sum(const std::vector<LocalTimeField::Entry>& entries,
                    const std::vector<double>& values);

/// Walk + fresh scenery on the visited sites; deterministic per seed.
RwrsSample sample_rwrs(const WalkConfig& cfg, const SceneryDistribution& dist,
                       std::int64_t n, std::uint64_t seed);

struct SecondMomentEstimate {
  double mean_x2 = 0.0;       // Monte Carlo mean of X_n^2
  double se_x2 = 0.0;
  double decoupled = 0.0;     // E[eta^2] * mean of sum_x l_n(x)^2
  double mean_diff = 0.0;     // mean of X^2 - E[eta^2] sum l^2 (zero-mean pairing)
  double se_diff = 0.0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
};

/// E[X_n^2] with the decoupled cross-check E[eta^2] E[sum_x l_n(x)^2]; the
/// difference is estimated pairwise, where its conditional mean vanishes.
SecondMomentEstimate second_moment(const WalkConfig& cfg,
                                   const SceneryDistribution& dist,
                                   std::int64_t n, std::int64_t replicas,
                                   std::uint64_t seed);

}  // namespace rwrs
