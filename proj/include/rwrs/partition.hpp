// The upper-bound partition scheme: the ladder b = b_1 < ... < b_{N+1} = a
// with its geometric gap recursion, the budget split of y, and the induced
// classification of range sites by local-time magnitude.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rwrs/estimate.hpp"
#include "rwrs/rwrs_process.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

struct PartitionScheme {
  // Inputs.
  double alpha = 0, y = 0;
  int d = 0;
  std::int64_t n = 0;
  double z_threshold = 0;

  // Derived ledger.
  double a = 0, b = 0;
  double delta0 = 0;  // (1/alpha - 2/d) / (1 - 2/d)
  double eps0 = 0;    // (delta0/2) / (1 - delta0/2)
  double chi = 0;
  double beta = 0;
  int N = 0;
  std::vector<double> b_list;      // b_1 .. b_{N+1}, b_1 = b, b_{N+1} = a
  std::vector<double> z_list;      // z_1 .. z_N, z_1 the top gap a - b_N
  std::vector<double> y_list;      // y_0 .. y_N
  double y_down = 0, y_up = 0;     // both y/3
  std::vector<double> gamma_list;  // gamma_i = (a - b_i) / (1 - 2/d), i = 1..N

  // Local-time thresholds of the range classes.
  double down_threshold = 0;   // z n^b
  double level0_upper = 0;     // y^a n^b
  std::vector<double> level_upper;  // y^a n^{b_{i+1}}, i = 1..N
  double up_threshold = 0;     // (y n)^a

  double gamma0() const { return gamma_list.empty() ? 0.0 : gamma_list.front(); }

  /// Largest relative violation over the construction identities (gap
  /// recursion, gap sum, budget sum, the beta requirement, monotonicity).
  double max_invariant_violation() const;

  /// Key-value text block, full precision, for audit.
  void serialize(std::ostream& os) const;
};

/// Builds the scheme: N is the smallest integer putting
/// chi = (a - b) log(n) / (1 + eps0)^{N-1} inside chi_range; beta is then
/// solved exactly from the budget sum y_0 + ... + y_N = y/3.
/// Throws "regime violation" unless 1 < alpha < d/2, and "no admissible N"
/// when chi_range cannot be met.
PartitionScheme build_scheme(double alpha, int d, std::int64_t n, double y,
                             double z_threshold = 0.1,
                             std::pair<double, double> chi_range = {0.5, 4.0});

/// Class labels: 0 = down, 1 + i = level i (i = 0..N), N + 2 = up.
struct RangeClassification {
  int num_levels = 0;  // N
  std::vector<int> labels;                // aligned with lt.entries()
  std::vector<std::int64_t> class_count;  // size N + 3
  std::vector<double> class_sum;          // per-class sum of l * eta (if given)
  double x_total = 0.0;                   // sum of class sums

  int down_index() const { return 0; }
  int level_index(int i) const { return 1 + i; }
  int up_index() const { return num_levels + 2; }
};

/// Assigns each range site to exactly one class by its local time; intervals
/// closed on the left, open on the right, ties at (yn)^a go up.
RangeClassification classify(const LocalTimeField& lt, const PartitionScheme& scheme);

/// Same, plus per-class partial sums of l_n(x) eta(x) from the sample.
RangeClassification classify(const RwrsSample& sample, const PartitionScheme& scheme);

/// Runtime check of the event decomposition: whenever x_n > n y, at least one
/// of {some level sum > n y_i, down sum > n y_down, up class nonempty} holds.
struct DecompositionReport {
  bool applicable = false;  // x_n > n y
  bool ok = true;           // vacuously true when not applicable
  bool down_fired = false;
  bool up_fired = false;
  std::vector<int> levels_fired;
};
DecompositionReport event_decomposition_check(const RwrsSample& sample,
                                              const PartitionScheme& scheme);

/// Monte Carlo frequency of D_up != empty (some site reaching (yn)^a visits
/// by time n).
TailEstimate d_up_probability(const WalkConfig& cfg, const PartitionScheme& scheme,
                              std::int64_t replicas, std::uint64_t seed);

/// The Chebyshev bound on the down-class contribution:
/// log P <= -(n^{1-b} / z) sup_{lambda in grid} (y_down lambda - nu(delta) lambda^2 / 2),
/// with delta = max of the grid. Also reports the observed down-class sum of
/// l^2 against its envelope z n^{1+b}.
struct DownChebyshevBound {
  double log_bound = 0.0;
  double lambda_star = 0.0;
  double delta = 0.0;
  double nu_delta = 0.0;
  double down_l2 = 0.0;
  double down_l2_envelope = 0.0;
};
DownChebyshevBound d_down_chebyshev(const LocalTimeField& lt,
                                    const SceneryDistribution& dist,
                                    const PartitionScheme& scheme,
                                    const std::vector<double>& lambda_grid);

}  // namespace rwrs
