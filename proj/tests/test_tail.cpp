#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwrs/tail_estimator.hpp"

using namespace rwrs;

namespace {
const WalkConfig kD3{3, IncrementLaw::kSimple};

LocalTimeField single_site(int visits) {
  LocalTimeField lt(1);
  for (int i = 0; i < visits; ++i) lt.add_visit(origin_site());
  return lt;
}
}  // namespace

TEST_CASE("tilting parameter: Gaussian single-site closed form") {
  SceneryDistribution gauss(2.0, 1.0);
  // One site with l = 1: Lambda'(lambda) = lambda/2, so lambda* = 2 target.
  LocalTimeField lt = single_site(1);
  for (double target : {0.1, 1.0, 7.5}) {
    double lam = tilting_parameter(lt, gauss, target);
    CHECK(lam == doctest::Approx(2.0 * target).epsilon(1e-7));
  }
  // Doubling l and the target halves the root: with l = 2, g(lam) = 2 lam,
  // so lam*(2 lt, 2t) = t = lam*(lt, t) / 2.
  LocalTimeField lt2 = single_site(2);
  double lam2 = tilting_parameter(lt2, gauss, 2.0);
  CHECK(lam2 == doctest::Approx(0.5 * tilting_parameter(lt, gauss, 1.0)).epsilon(1e-7));
}

TEST_CASE("tilting parameter: vanishing target, unreachable target") {
  SceneryDistribution gauss(2.0, 1.0);
  LocalTimeField lt = single_site(1);
  CHECK(tilting_parameter(lt, gauss, 1e-8) < 1e-7);
  CHECK_THROWS_AS(tilting_parameter(lt, gauss, 1e10), TargetUnreachable);

  // alpha = 1: the root always exists below the MGF boundary.
  SceneryDistribution lap(1.0, 1.0);
  LocalTimeField lt3 = single_site(3);
  double lam = tilting_parameter(lt3, lap, 500.0);
  CHECK(lam * 3.0 < 1.0);
  CHECK(lam > 0.0);
}

TEST_CASE("inner tilted weight is a unit-mean likelihood ratio") {
  // Resolvable only at moderate tilt: the weight spread is exp(lambda sd(X))
  // per sample, so keep lambda* sd(X) of order one.
  SceneryDistribution gauss(2.0, 1.0);
  auto [mean, se] = tilted_weight_normalization(kD3, gauss, 128, 0.05, 4000, 99);
  CHECK(se < 0.2);
  CHECK(std::abs(mean - 1.0) <= 3.5 * se);
}

TEST_CASE("naive and tilted estimators agree at moderate (n, y)") {
  SceneryDistribution gauss(2.0, 1.0);
  TailEstimate nv = naive_tail(kD3, gauss, 64, 0.25, 200000, 4001);
  TailEstimate tl = tilted_tail(kD3, gauss, 64, 0.25, 20000, 8, 4002);
  REQUIRE(nv.p() > 0.0);
  double sigma = std::sqrt(nv.variance + tl.p() * tl.p() * tl.se_log * tl.se_log);
  CHECK(std::abs(nv.p() - tl.p()) <= 3.0 * sigma);
}

TEST_CASE("tilted log-estimate decreases in y") {
  SceneryDistribution gauss(2.0, 1.0);
  TailEstimate lo = tilted_tail(kD3, gauss, 64, 0.3, 8000, 8, 11);
  TailEstimate hi = tilted_tail(kD3, gauss, 64, 0.6, 8000, 8, 11);
  CHECK(hi.log_p < lo.log_p + 3.0 * (lo.se_log + hi.se_log));
}

TEST_CASE("naive tail: sure-miss and coin-flip boundaries") {
  SceneryDistribution gauss(2.0, 1.0);
  TailEstimate miss = naive_tail(kD3, gauss, 32, 1e6, 2000, 5);
  CHECK(std::isinf(miss.log_p));
  TailEstimate half = naive_tail(kD3, gauss, 32, 1e-9, 20000, 6);
  CHECK(std::abs(half.p() - 0.5) <= 4.0 * half.se());
}

TEST_CASE("spiked and plain outer sampling agree where both resolve") {
  SceneryDistribution lap(1.0, 1.0);
  TiltedOptions spiked;
  spiked.spike_max = 16;
  TailEstimate plain = tilted_tail(kD3, lap, 64, 0.6, 40000, 8, 21);
  TailEstimate spike = tilted_tail(kD3, lap, 64, 0.6, 40000, 8, 22, spiked);
  double sigma = std::hypot(plain.se_log, spike.se_log);
  CHECK(std::abs(plain.log_p - spike.log_p) <= 3.5 * sigma);
}

TEST_CASE("tilted estimator is deterministic per seed") {
  SceneryDistribution lap(1.0, 1.0);
  TiltedOptions opt;
  opt.spike_max = 8;
  TailEstimate a = tilted_tail(kD3, lap, 64, 0.5, 4000, 4, 303, opt);
  TailEstimate b = tilted_tail(kD3, lap, 64, 0.5, 4000, 4, 303, opt);
  CHECK(a.log_p == b.log_p);
  CHECK(a.se_log == b.se_log);
}

TEST_CASE("lower bound: direct substitution at k = 1 and bracket failure") {
  WalkConfig cfg = kD3;
  SceneryDistribution lap(1.0, 1.0);
  ReturnTimeCdf cdf = estimate_return_cdf(cfg, 100000, 20000, 61);
  const std::int64_t n = 128;
  const double y = 1.0;
  LowerBoundResult lb = lower_bound(cdf, lap, n, y, 1);
  double bracket = std::exp(-cdf.kappa0()) - cdf.prob_late_return(n);
  CHECK(lb.log_walk_part == doctest::Approx(std::log(bracket)).epsilon(1e-12));
  // Laplace closed form: log P(eta > ny) = -ny + log(1/2).
  CHECK(lb.log_scenery_part ==
        doctest::Approx(-static_cast<double>(n) * y + std::log(0.5)).epsilon(1e-9));
  CHECK(lb.log_bound == doctest::Approx(lb.log_walk_part + lb.log_scenery_part));

  // k far beyond what n steps can return: the bracket collapses.
  CHECK_THROWS_AS(lower_bound(cdf, lap, 8, 1.0, 4000), std::runtime_error);
}

TEST_CASE("lower bound sits below the tilted estimate") {
  SceneryDistribution lap(1.0, 1.0);
  ReturnTimeCdf cdf = estimate_return_cdf(kD3, 150000, 50000, 63);
  TiltedOptions opt;
  opt.spike_max = 28;
  TailEstimate est = tilted_tail(kD3, lap, 256, 1.0, 8000, 8, 64, opt);
  LowerBoundResult lb = lower_bound(cdf, lap, 256, 1.0);
  CHECK(lb.log_bound <= est.log_p + 3.0 * est.se_log);
}

TEST_CASE("optimal-k scan peaks near (ny)^a") {
  SceneryDistribution lap(1.0, 1.0);
  ReturnTimeCdf cdf = estimate_return_cdf(kD3, 150000, 50000, 65);
  const std::int64_t n = 256;
  const double ny = 256.0;
  double ka = std::pow(ny, lap.a());  // 16
  auto scan = scan_lower_bound(cdf, lap, n, 1.0,
                               static_cast<std::int64_t>(std::ceil(3.0 * ka)));
  REQUIRE(!scan.empty());
  std::int64_t best_k = scan.front().k;
  double best = scan.front().log_bound;
  for (const auto& r : scan)
    if (r.log_bound > best) {
      best = r.log_bound;
      best_k = r.k;
    }
  CHECK(best_k >= static_cast<std::int64_t>(ka / 2.0));
  CHECK(best_k <= static_cast<std::int64_t>(2.0 * ka));
}

TEST_CASE("exponent fit: exact on synthetic pure powers, input validation") {
  // P = exp(-(ny)^{0.5})
  std::vector<std::pair<double, double>> pts;
  for (double n : {256.0, 1024.0, 4096.0, 16384.0})
    pts.emplace_back(n, -std::pow(n, 0.5));
  ExponentFit fit = fit_exponent(pts, 1.0);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fit.residual_norm < 1e-9);

  // P = exp(-2 (ny)^{0.6}): the constant lands in the intercept.
  pts.clear();
  for (double n : {100.0, 400.0, 1600.0})
    pts.emplace_back(n, -2.0 * std::pow(0.5 * n, 0.6));
  ExponentFit fit2 = fit_exponent(pts, 0.5);
  CHECK(fit2.slope == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(fit2.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(fit_exponent({{10.0, -1.0}, {20.0, -2.0}}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      fit_exponent({{10.0, -1.0}, {20.0, 0.0}, {40.0, -2.0}}, 1.0),
      std::invalid_argument);  // p = 1
  CHECK_THROWS_AS(
      fit_exponent({{10.0, -1.0},
                    {20.0, -std::numeric_limits<double>::infinity()},
                    {40.0, -2.0}},
                   1.0),
      std::invalid_argument);  // p = 0
}
