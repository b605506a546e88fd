#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rwrs/rwrs_process.hpp"

using namespace rwrs;

namespace {
LocalTimeField hand_field() {
  LocalTimeField lt(1);
  Site s0, s1;
  s1.c[0] = 1;
  lt.add_visit(s0);
  lt.add_visit(s1);
  lt.add_visit(s0);
  lt.add_visit(s1);
  return lt;
}
}  // namespace

TEST_CASE("weighted sum: hand arithmetic, zeros, linearity") {
  LocalTimeField lt = hand_field();
  CHECK(weighted_sum(lt.entries(), {1.5, -0.5}) == doctest::Approx(2.0));
  CHECK(weighted_sum(lt.entries(), {0.0, 0.0}) == 0.0);
  double x = weighted_sum(lt.entries(), {0.7, -1.3});
  CHECK(weighted_sum(lt.entries(), {3 * 0.7, 3 * -1.3}) ==
        doctest::Approx(3.0 * x).epsilon(1e-14));
}

TEST_CASE("evaluate_x is the field-consistent weighted sum") {
  SceneryDistribution dist(1.5, 1.0);
  LocalTimeField lt = simulate_local_times(WalkConfig{3, IncrementLaw::kSimple},
                                           2000, 5);
  SceneryField field(dist, 91);
  double a = evaluate_x(lt, field);
  double b = evaluate_x(lt, field);  // cached values, same answer
  CHECK(a == b);
  // Matches the explicit sum over entries.
  std::vector<double> vals;
  for (const auto& e : lt.entries()) vals.push_back(field.value(e.site));
  CHECK(a == doctest::Approx(weighted_sum(lt.entries(), vals)).epsilon(1e-15));
}

TEST_CASE("n=0 sample is a single scenery draw") {
  SceneryDistribution dist(2.0, 1.0);
  RwrsSample s = sample_rwrs(WalkConfig{2, IncrementLaw::kSimple}, dist, 0, 77);
  REQUIRE(s.scenery_values.size() == 1);
  CHECK(s.x_n == doctest::Approx(s.scenery_values[0]));
  CHECK(s.local_times.total_time() == 0);
}

TEST_CASE("sample_rwrs is deterministic per seed and centered over replicas") {
  WalkConfig cfg{1, IncrementLaw::kSimple};
  SceneryDistribution dist(1.5, 1.0);
  RwrsSample a = sample_rwrs(cfg, dist, 500, 13);
  RwrsSample b = sample_rwrs(cfg, dist, 500, 13);
  CHECK(a.x_n == b.x_n);

  const int reps = 10000;
  double s = 0, s2 = 0;
  for (int r = 0; r < reps; ++r) {
    double x = sample_rwrs(cfg, dist, 256, 100 + static_cast<std::uint64_t>(r)).x_n;
    s += x;
    s2 += x * x;
  }
  double mean = s / reps;
  double sd = std::sqrt(s2 / reps - mean * mean);
  CHECK(std::abs(mean) <= 4.0 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("X_n is symmetric: KS distance between x and -x stays small") {
  WalkConfig cfg{3, IncrementLaw::kSimple};
  SceneryDistribution dist(1.5, 1.0);
  const int reps = 10000;
  std::vector<double> xs;
  xs.reserve(reps);
  for (int r = 0; r < reps; ++r)
    xs.push_back(sample_rwrs(cfg, dist, 128, 7000 + static_cast<std::uint64_t>(r)).x_n);
  std::vector<double> neg(xs);
  for (double& v : neg) v = -v;
  std::sort(xs.begin(), xs.end());
  std::sort(neg.begin(), neg.end());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < xs.size() && j < neg.size()) {
    if (xs[i] <= neg[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / reps);
  }
  CHECK(d < 0.03);  // ~KS critical value at the 0.1% level for n = m = 1e4
}

TEST_CASE("second moment: decoupling identity within 3 sigma at d = 1 and 3") {
  SceneryDistribution dist(1.5, 1.0);
  for (int d : {1, 3}) {
    SecondMomentEstimate e = second_moment(WalkConfig{d, IncrementLaw::kSimple},
                                           dist, 512, 8000, 2026);
    CHECK(std::abs(e.mean_diff) <= 3.0 * e.se_diff);
    CHECK(e.mean_x2 > 0.0);
  }
}

TEST_CASE("mean-square scaling ratios are stable") {
  SceneryDistribution dist(2.0, 1.0);
  // d = 1: E[X_n^2] / n^{3/2} within factor 1.5 across the n ladder.
  {
    std::vector<double> ratios;
    for (std::int64_t n : {1000, 4000, 16000}) {
      SecondMomentEstimate e = second_moment(WalkConfig{1, IncrementLaw::kSimple},
                                             dist, n, 6000, 31);
      ratios.push_back(e.mean_x2 / std::pow(static_cast<double>(n), 1.5));
    }
    auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 1.5);
  }
  // d = 3: E[X_n^2] / n likewise.
  {
    std::vector<double> ratios;
    for (std::int64_t n : {1000, 4000, 16000}) {
      SecondMomentEstimate e = second_moment(WalkConfig{3, IncrementLaw::kSimple},
                                             dist, n, 6000, 37);
      ratios.push_back(e.mean_x2 / static_cast<double>(n));
    }
    auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 1.5);
  }
}
