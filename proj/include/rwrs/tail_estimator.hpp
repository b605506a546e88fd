// Estimates of P(X_n >= n y): naive Monte Carlo, a two-level estimator that
// tilts the scenery conditionally on the walk's local times, and the analytic
// single-site lower bound; plus the speed-exponent fit over an n-sweep.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rwrs/estimate.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

struct TargetUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Root of g(lambda) = sum_x l_n(x) Lambda'(lambda l_n(x)) - target. g is
/// strictly increasing (sum of derivatives of convex functions), so the root
/// is unique; found by bracketing + bisection to relative tolerance 1e-8.
/// For alpha = 1 the root always lies below the MGF boundary c / max l; for
/// alpha > 1 bracketing past lambda = 1e3 throws TargetUnreachable.
double tilting_parameter(const LocalTimeField& lt, const SceneryDistribution& dist,
                         double target);

/// Same solve on a local-time histogram (counts[l] = sites with local time l).
double tilting_parameter(const std::vector<std::int64_t>& counts,
                         const SceneryDistribution& dist, double target);

/// Hit frequency of {X_n >= n y} with binomial variance.
TailEstimate naive_tail(const WalkConfig& cfg, const SceneryDistribution& dist,
                        std::int64_t n, double y, std::int64_t replicas,
                        std::uint64_t seed);

/// Extra knobs for the two-level estimator. spike_max = 0
/// reproduces the plain estimator (walk measure untilted). A positive
/// spike_max mixes in walk proposals that prepend k conditioned excursions at
/// the origin (k uniform on 1..spike_max, defensive weight on k = 0), with
/// exact likelihood-ratio weights; this is what lets the alpha = 1 pipeline
/// reach the (ny)^{1/2} regime, where the dominant walk behavior is itself
/// exponentially rare.
struct TiltedOptions {
  int spike_max = 0;
  std::int64_t spike_excursion_cap = 0;   // 0: auto = clamp(n/8, 8, 2048)
  std::int64_t spike_escape_radius = 12;  // excursion attempt abort radius
  double spike_defensive_weight = 0.5;    // proposal mass on k = 0
  std::int64_t pc_replicas = 2'000'000;   // excursion-acceptance estimation
  double tilt_margin = 1e-9;              // relative MGF-boundary margin, alpha=1
};

/// Two-level estimator: outer loop over walks, inner loop drawing the scenery
/// from the product-tilted law (site x tilted by lambda* l_n(x)) and averaging
/// the likelihood-ratio weight exp(-lambda* X_n + sum_x Lambda(lambda* l_n(x)))
/// on {X_n >= n y}. Deterministic per (seed, outer_replicas).
TailEstimate tilted_tail(const WalkConfig& cfg, const SceneryDistribution& dist,
                         std::int64_t n, double y, std::int64_t outer_replicas,
                         std::int64_t inner_replicas, std::uint64_t seed,
                         const TiltedOptions& options = {});

/// Mean (and its standard error) of the inner tilted weight without the
/// indicator for one sampled walk; equals 1 in expectation.
std::pair<double, double> tilted_weight_normalization(
    const WalkConfig& cfg, const SceneryDistribution& dist, std::int64_t n,
    double y, std::int64_t inner_replicas, std::uint64_t seed);

struct LowerBoundResult {
  double log_bound = 0.0;
  std::int64_t k = 0;
  double log_walk_part = 0.0;     // k log(e^{-kappa0_hat} - P_hat(n/k < H0 < inf))
  double log_scenery_part = 0.0;  // log P(eta > ny/k)
};

/// The single-site lower bound: P(X_n >= ny) >= P(l_n(0) >= k) P(eta > ny/k),
/// with the walk factor bounded below through the estimated return-time law.
/// Default k = floor((ny)^a). Throws if the return bracket is <= 0 (n too
/// small for the chosen k).
LowerBoundResult lower_bound(const ReturnTimeCdf& cdf,
                             const SceneryDistribution& dist, std::int64_t n,
                             double y, std::int64_t k = 0);

/// Convenience overload running its own return-time estimation.
LowerBoundResult lower_bound(const WalkConfig& cfg, const SceneryDistribution& dist,
                             std::int64_t n, double y, std::int64_t k,
                             std::int64_t cdf_replicas, std::int64_t cdf_horizon,
                             std::uint64_t seed);

/// Bound value for every k in [1, k_max]; used for the optimal-k scan.
std::vector<LowerBoundResult> scan_lower_bound(const ReturnTimeCdf& cdf,
                                               const SceneryDistribution& dist,
                                               std::int64_t n, double y,
                                               std::int64_t k_max);

struct ExponentFit {
  std::vector<std::pair<double, double>> points;  // (log(n y), log(-log p))
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
};

/// Least-squares slope of log(-log p) against log(n y). Needs >= 3 points and
/// p strictly inside (0, 1) everywhere.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& n_and_log_p,
                         double y);

/// End-to-end exponent recovery: one return-time run (reused for kappa0, the
/// lower bounds, and the spike sizing), per-n tail estimates, and the fit.
struct ExponentPipelineConfig {
  WalkConfig walk;
  SceneryDistribution dist{1.0, 1.0};
  std::vector<std::int64_t> n_values;
  double y = 1.0;
  std::int64_t outer_replicas = 100'000;
  std::int64_t inner_replicas = 8;
  std::uint64_t seed = 1;
  bool spike = true;  // enable the spiked walk proposal (needed at alpha = 1)
  std::int64_t cdf_replicas = 400'000;
  std::int64_t cdf_horizon = 200'000;
};

struct ExponentPipelineResult {
  std::vector<TailEstimate> estimates;
  std::vector<LowerBoundResult> bounds;
  ExponentFit fit;
  double p_ret = 0.0;
  double kappa0 = 0.0;
};

ExponentPipelineResult run_exponent_pipeline(const ExponentPipelineConfig& cfg);

}  // namespace rwrs
