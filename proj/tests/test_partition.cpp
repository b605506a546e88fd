#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rwrs/partition.hpp"

using namespace rwrs;

TEST_CASE("delta0 and eps0 by direct substitution at (alpha, d) = (2, 5)") {
  PartitionScheme s = build_scheme(2.0, 5, 1000000, 1.0);
  CHECK(s.delta0 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(s.eps0 == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(s.a == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.b == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  double zsum = 0;
  for (double z : s.z_list) zsum += z;
  CHECK(zsum == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("scheme invariants hold to 1e-12 across the admissible grid") {
  for (double alpha : {1.5, 2.0})
    for (int d : {4, 5, 7}) {
      if (!(alpha < d / 2.0)) continue;
      for (double n : {1e4, 1e6, 1e8})
        for (double y : {0.5, 1.0, 2.0}) {
          PartitionScheme s =
              build_scheme(alpha, d, static_cast<std::int64_t>(n), y);
          CHECK(s.max_invariant_violation() < 1e-12);
          CHECK(s.N == oracles::brute_force_ladder_size(alpha, d, n, 4.0));
        }
    }
}

TEST_CASE("regime violations and threshold-order guard") {
  CHECK_THROWS_AS(build_scheme(2.0, 4, 10000, 1.0), std::domain_error);
  CHECK_THROWS_AS(build_scheme(1.0, 5, 10000, 1.0), std::domain_error);
  CHECK_THROWS_AS(build_scheme(2.5, 5, 10000, 1.0), std::domain_error);
  // z must stay below y^a or the class intervals break.
  CHECK_THROWS_AS(build_scheme(2.0, 5, 10000, 0.5, 0.7), std::invalid_argument);
}

TEST_CASE("ladder size grows slowly and monotonically in n") {
  for (double alpha : {1.5, 2.0})
    for (int d : {5, 7}) {
      if (!(alpha < d / 2.0)) continue;
      int prev = 0;
      for (double n : {1e4, 1e6, 1e8, 1e12}) {
        int N = oracles::brute_force_ladder_size(alpha, d, n, 4.0);
        CHECK(N >= prev);
        prev = N;
        if (n <= 1e8) {
          PartitionScheme s =
              build_scheme(alpha, d, static_cast<std::int64_t>(n), 1.0);
          CHECK(s.N == N);
        }
      }
    }
}

TEST_CASE("classification: hand thresholds and the up tie rule") {
  // alpha=2, d=5, n=4096, y=1: (yn)^a = 4096^{2/3} = 256 exactly.
  PartitionScheme s = build_scheme(2.0, 5, 4096, 1.0);
  CHECK(s.up_threshold == doctest::Approx(256.0).epsilon(1e-12));

  LocalTimeField lt(5);
  Site a;  // l = 1: below z n^b = 0.1 * 16 = 1.6, so down
  a.c[0] = 1;
  lt.add_visit(a);
  Site b;  // l = 256: exactly the up threshold, ties go up
  b.c[0] = 2;
  for (int i = 0; i < 256; ++i) lt.add_visit(b);
  Site c;  // l = 255: top level, not up
  c.c[0] = 3;
  for (int i = 0; i < 255; ++i) lt.add_visit(c);

  RangeClassification rc = classify(lt, s);
  REQUIRE(rc.labels.size() == 3);
  CHECK(rc.labels[0] == rc.down_index());
  CHECK(rc.labels[1] == rc.up_index());
  CHECK(rc.labels[2] == rc.level_index(s.N));
  CHECK(rc.class_count[static_cast<std::size_t>(rc.up_index())] == 1);
}

TEST_CASE("classification partitions the range and re-adds x_n") {
  PartitionScheme s = build_scheme(2.0, 5, 2000, 0.5);
  SceneryDistribution dist(2.0, 1.0);
  WalkConfig cfg{5, IncrementLaw::kSimple};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RwrsSample sample = sample_rwrs(cfg, dist, 2000, seed);
    RangeClassification rc = classify(sample, s);
    std::int64_t covered = 0;
    for (auto cnt : rc.class_count) covered += cnt;
    CHECK(covered == sample.local_times.support_size());
    double resum = 0;
    for (double v : rc.class_sum) resum += v;
    CHECK(std::abs(resum - sample.x_n) <=
          1e-9 * std::max(1.0, std::abs(sample.x_n)));
    CHECK(rc.x_total == doctest::Approx(sample.x_n).epsilon(1e-12));
  }
}

TEST_CASE("event decomposition: vacuous, constructed firing, simulated sweep") {
  PartitionScheme s = build_scheme(2.0, 5, 10000, 0.5);
  SceneryDistribution dist(2.0, 1.0);
  WalkConfig cfg{5, IncrementLaw::kSimple};

  // Typical sample: x_n <= ny, vacuous pass.
  RwrsSample typical = sample_rwrs(cfg, dist, 10000, 5);
  DecompositionReport rep = event_decomposition_check(typical, s);
  CHECK((rep.applicable == false || rep.ok));

  // Constructed sample: all mass on one mid-level site.
  {
    RwrsSample built{LocalTimeField(5), {}, 0.0};
    LocalTimeField lt(5);
    Site hot;
    hot.c[0] = 7;
    int l_mid = static_cast<int>(std::floor(0.5 * (s.level0_upper +
                                                   (s.level_upper.empty()
                                                        ? s.up_threshold
                                                        : s.level_upper[0]))));
    for (int i = 0; i < l_mid; ++i) lt.add_visit(hot);
    std::int64_t remaining = 10001 - l_mid;
    for (std::int64_t i = 0; i < remaining; ++i) {
      Site filler;
      filler.c[0] = static_cast<std::int32_t>(100 + i);
      lt.add_visit(filler);
    }
    built.local_times = std::move(lt);
    built.scenery_values.assign(built.local_times.entries().size(), 0.0);
    built.scenery_values[0] = 2.0 * 10000.0 * 0.5 / l_mid;  // x_n = 2 ny
    built.x_n = weighted_sum(built.local_times.entries(), built.scenery_values);
    REQUIRE(built.x_n > 10000.0 * 0.5);
    DecompositionReport r = event_decomposition_check(built, s);
    CHECK(r.applicable);
    CHECK(r.ok);
    CHECK(!r.levels_fired.empty());
    CHECK_FALSE(r.down_fired);
  }

  // Simulated sweep: the inclusion is a theorem; zero violations.
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    RwrsSample sample = sample_rwrs(cfg, dist, 10000, 1000 + seed);
    if (!event_decomposition_check(sample, s).ok) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("D_up probability: impossible threshold, monotone in y") {
  // (yn)^a > n + 1 makes the event impossible.
  {
    PartitionScheme s = build_scheme(2.0, 5, 100, 11.0, 0.1);
    CHECK(s.up_threshold > 101.0);
    TailEstimate e = d_up_probability(WalkConfig{5, IncrementLaw::kSimple}, s,
                                      2000, 9);
    CHECK(e.p() == 0.0);
  }
  // Decreasing in y at fixed n (3 sigma).
  {
    WalkConfig cfg{3, IncrementLaw::kSimple};
    PartitionScheme lo = build_scheme(1.25, 3, 100, 0.095, 0.05);
    PartitionScheme hi = build_scheme(1.25, 3, 100, 0.2, 0.05);
    TailEstimate pl = d_up_probability(cfg, lo, 30000, 10);
    TailEstimate ph = d_up_probability(cfg, hi, 30000, 10);
    CHECK(ph.p() <= pl.p() + 3.0 * std::sqrt(pl.variance + ph.variance));
  }
}

TEST_CASE("down-class Chebyshev bound: degenerate budget, z ordering, vs MC") {
  SceneryDistribution dist(1.25, 1.0);
  WalkConfig cfg{3, IncrementLaw::kSimple};
  PartitionScheme s = build_scheme(1.25, 3, 256, 0.15, 0.12);
  LocalTimeField lt = simulate_local_times(cfg, 256, 424);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.025 * i);

  // y_down = 0 collapses the supremum to the lambda = 0 corner.
  {
    PartitionScheme zero = s;
    zero.y_down = 0.0;
    DownChebyshevBound b = d_down_chebyshev(lt, dist, zero, grid);
    CHECK(b.log_bound == 0.0);
    CHECK(b.lambda_star == 0.0);
  }
  // The bound tightens as z decreases.
  {
    PartitionScheme za = build_scheme(1.25, 3, 256, 0.15, 0.2);
    PartitionScheme zb = build_scheme(1.25, 3, 256, 0.15, 0.05);
    DownChebyshevBound ba = d_down_chebyshev(lt, dist, za, grid);
    DownChebyshevBound bb = d_down_chebyshev(lt, dist, zb, grid);
    CHECK(bb.log_bound < ba.log_bound);
  }
  // Analytic bound dominates the empirical down-sum tail.
  {
    DownChebyshevBound b = d_down_chebyshev(lt, dist, s, grid);
    const double target = 256.0 * s.y_down;
    int hits = 0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
      RwrsSample sample = sample_rwrs(cfg, dist, 256, 9000 + static_cast<std::uint64_t>(r));
      RangeClassification rc = classify(sample, s);
      if (rc.class_sum[static_cast<std::size_t>(rc.down_index())] > target) ++hits;
    }
    REQUIRE(hits > 0);
    double freq = static_cast<double>(hits) / reps;
    CHECK(std::log(freq) <= b.log_bound + 1e-9);
    CHECK(b.down_l2 <= b.down_l2_envelope);
  }
}

TEST_CASE("scheme serialization carries every field at full precision") {
  PartitionScheme s = build_scheme(1.5, 5, 100000, 1.0);
  std::ostringstream os;
  s.serialize(os);
  std::string text = os.str();
  CHECK(text.find("delta0 ") != std::string::npos);
  CHECK(text.find("beta ") != std::string::npos);
  CHECK(text.find("z_1 ") != std::string::npos);
  CHECK(text.find("gamma_1 ") != std::string::npos);
  CHECK(text.find("up_threshold ") != std::string::npos);
  // Round-trips chi exactly through the printed representation.
  auto pos = text.find("chi ");
  double chi = std::stod(text.substr(pos + 4));
  CHECK(chi == s.chi);
}
