// Lattice random-walk engine: paths, local times, range, sojourn times,
// return-probability and Green-function estimation.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rwrs/estimate.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

inline constexpr int kMaxDim = 8;

/// Lattice point. Coordinates beyond the active dimension stay zero, so
/// equality and hashing can run over the full array.
struct Site {
  std::array<std::int32_t, kMaxDim> c{};

  friend bool operator==(const Site&, const Site&) = default;
};

inline Site origin_site() { return Site{}; }

/// Sup-norm: max_i |x_i|.
inline std::int64_t sup_norm(const Site& s) {
  std::int64_t m = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    std::int64_t a = s.c[i] < 0 ? -static_cast<std::int64_t>(s.c[i]) : s.c[i];
    if (a > m) m = a;
  }
  return m;
}

inline std::uint64_t site_hash(const Site& s) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (int i = 0; i < kMaxDim; i += 2) {
    std::uint64_t w = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.c[i])) << 32) |
                      static_cast<std::uint32_t>(s.c[i + 1]);
    h = mix64(h ^ w);
  }
  return h;
}

enum class IncrementLaw {
  kSimple,      // uniform on the 2d unit vectors
  kLazySimple,  // hold with probability 1/2, else simple
};

struct WalkConfig {
  int dimension = 1;
  IncrementLaw law = IncrementLaw::kSimple;

  void validate() const;  // throws std::invalid_argument on d out of [1, 8]
};

/// One lattice step drawn from the configured increment law.
inline void apply_step(const WalkConfig& cfg, SplitMix64& rng, Site& s) {
  const std::uint64_t two_d = static_cast<std::uint64_t>(2 * cfg.dimension);
  if (cfg.law == IncrementLaw::kSimple) {
    std::uint64_t r = uniform_below(rng, two_d);
    s.c[r >> 1] += (r & 1) ? 1 : -1;
  } else {
    std::uint64_t r = uniform_below(rng, 2 * two_d);
    if (r < two_d) s.c[r >> 1] += (r & 1) ? 1 : -1;
  }
}

struct Path {
  WalkConfig config;
  std::vector<Site> positions;  // S_0 .. S_n, S_0 = origin

  std::int64_t steps() const {
    return static_cast<std::int64_t>(positions.size()) - 1;
  }
};

/// Sparse site -> occupation count map. Iteration order is first-visit order,
/// a pure function of the path, which keeps everything downstream of it
/// deterministic. Maintains sum l^2 incrementally (each visit adds 2l+1).
class LocalTimeField {
 public:
  explicit LocalTimeField(int dimension, std::int64_t expected_sites = 16);

  void add_visit(const Site& s);
  std::int64_t count(const Site& s) const;  // 0 when never visited

  std::int64_t total_visits() const { return total_visits_; }     // sum l = n+1
  std::int64_t total_time() const { return total_visits_ - 1; }   // n
  std::int64_t support_size() const {
    return static_cast<std::int64_t>(entries_.size());
  }
  std::int64_t max_count() const { return max_count_; }
  std::int64_t self_intersections() const { return sum_sq_; }  // sum l^2
  int dimension() const { return dimension_; }

  struct Entry {
    Site site;
    std::int64_t count;
  };
  const std::vector<Entry>& entries() const { return entries_; }

  /// counts[l] = number of range sites with local time exactly l.
  std::vector<std::int64_t> count_histogram() const;

  void clear();

 private:
  void rehash(std::size_t slots);
  std::size_t find_slot(const Site& s) const;

  int dimension_;
  std::vector<Entry> entries_;
  std::vector<std::int32_t> index_;  // open addressing into entries_, -1 empty
  std::size_t mask_ = 0;
  std::int64_t total_visits_ = 0;
  std::int64_t sum_sq_ = 0;
  std::int64_t max_count_ = 0;
};

/// Reproducible path generation: identical (config, n, seed) gives identical
/// output, S_0 = origin.
Path simulate_path(const WalkConfig& cfg, std::int64_t n, std::uint64_t seed);

LocalTimeField local_times(const Path& path);

/// Fused generation + accumulation; equals local_times(simulate_path(...)).
LocalTimeField simulate_local_times(const WalkConfig& cfg, std::int64_t n,
                                    std::uint64_t seed);

/// Adds the origin visit plus n steps from rng into lt (cleared by caller).
void accumulate_walk(const WalkConfig& cfg, std::int64_t n, SplitMix64& rng,
                     LocalTimeField& lt);

std::int64_t max_displacement(const Path& path);

struct SojournResult {
  std::int64_t count = 0;
  bool truncated = false;  // horizon, not the escape ball, stopped the run
};

/// Occupation count of region up to min(horizon, first exit from the sup-norm
/// ball of escape_radius). Requires d >= 3; pass escape_radius <= 0 for the
/// default 64 * diam(region).
SojournResult sojourn_time(const WalkConfig& cfg, const std::vector<Site>& region,
                           std::int64_t horizon, std::int64_t escape_radius,
                           std::uint64_t seed);

inline constexpr std::int64_t kDefaultSojournHorizon = 1'000'000;

/// Per-replica sojourn counts of the box {0..side-1}^d, for tail-slope fits.
struct BoxSojournSample {
  std::vector<std::int64_t> counts;  // one per replica
  double truncated_fraction = 0.0;
  std::int64_t box_volume = 0;
};
BoxSojournSample box_sojourn_samples(const WalkConfig& cfg, int side,
                                     std::int64_t replicas, std::int64_t horizon,
                                     std::int64_t escape_radius,
                                     std::uint64_t seed);

/// Least-squares slope of -log P(l_infinity(box) > t) against t / |box|^{2/d},
/// over >= min_points thresholds that each keep >= min_hits tail hits.
struct BoxSlopeFit {
  double slope = 0.0;
  int points_used = 0;
  std::int64_t min_tail_hits = 0;  // hits at the deepest threshold used
  double u_lo = 0.0, u_hi = 0.0;   // fitted range of t / |box|^{2/d}
};
BoxSlopeFit fit_box_sojourn_slope(const BoxSojournSample& sample, int dimension,
                                  int min_points = 5, std::int64_t min_hits = 100);

/// Fraction of replicas returning to the origin by the horizon.
TailEstimate estimate_return_prob(const WalkConfig& cfg, std::int64_t replicas,
                                  std::int64_t horizon, std::uint64_t seed);

/// Empirical distribution of the first return time H_0, truncated at horizon.
/// prob_late_return(m) approximates P(m < H_0 < infinity) from below (returns
/// past the horizon are unobserved).
struct ReturnTimeCdf {
  std::vector<std::int64_t> returned_by;  // index m: replicas with H_0 <= m
  std::int64_t replicas = 0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;

  double prob_return_le(std::int64_t m) const;
  double p_ret() const { return prob_return_le(horizon); }
  double kappa0() const;  // -log p_ret
  double prob_late_return(std::int64_t m) const {
    return p_ret() - prob_return_le(m);
  }
};
ReturnTimeCdf estimate_return_cdf(const WalkConfig& cfg, std::int64_t replicas,
                                  std::int64_t horizon, std::uint64_t seed);

/// P(l_infinity(0) >= k) for every k = 1..k_max out of one run.
std::vector<TailEstimate> local_time_tail_curve(const WalkConfig& cfg, int k_max,
                                                std::int64_t replicas,
                                                std::int64_t horizon,
                                                std::uint64_t seed);

/// P(l_infinity(0) >= k).
TailEstimate local_time_tail(const WalkConfig& cfg, int k, std::int64_t replicas,
                             std::int64_t horizon, std::uint64_t seed);

/// Mean occupation of target over the walk's (horizon-truncated) lifetime,
/// i.e. the Green function G(0, target) for d >= 3.
MeanEstimate green_function(const WalkConfig& cfg, const Site& target,
                            std::int64_t replicas, std::int64_t horizon,
                            std::uint64_t seed);

}  // namespace rwrs
