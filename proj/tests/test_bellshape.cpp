#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwrs/bellshape.hpp"

using namespace rwrs;

namespace {
GridDensity gaussian_grid(double sigma2, double w, int bins) {
  return render_grid(
      [=](double t) {
        return std::exp(-t * t / (2.0 * sigma2)) / std::sqrt(2.0 * M_PI * sigma2);
      },
      w, bins);
}
}  // namespace

TEST_CASE("grid invariants: mass window and evenness for rendered densities") {
  for (double alpha : {1.0, 1.5, 2.0}) {
    SceneryDistribution d(alpha, 1.0);
    GridDensity gd = render_density(d, 0.0, 8192);
    double m = gd.mass();
    // Truncation only loses mass; the trapezoid rule can overshoot by its
    // h^2/12 integral |f''| discretization error (largest at alpha = 1).
    double h = gd.spacing();
    CHECK(m <= 1.0 + h * h / 6.0);
    CHECK(m >= 1.0 - 1e-6);
    BellShapeReport rep = is_bell_shaped(gd, 1e-12);
    CHECK(rep.ok);
  }
}

TEST_CASE("bell-shape detector: Gaussian, bimodal counterexample, uniform") {
  CHECK(is_bell_shaped(gaussian_grid(0.5, 10.0, 2048), 1e-12).ok);

  GridDensity bimodal = render_grid(
      [](double t) {
        return 0.5 * (std::exp(-(t - 2) * (t - 2)) + std::exp(-(t + 2) * (t + 2))) /
               std::sqrt(M_PI);
      },
      8.0, 1024);
  BellShapeReport rep = is_bell_shaped(bimodal, 1e-12);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.monotone);
  CHECK(rep.violation_index >= 512);  // rises somewhere on the positive axis
  CHECK(rep.violation > 0.0);

  GridDensity uniform = render_grid(
      [](double t) { return std::abs(t) <= 1.0 ? 0.5 : 0.0; }, 2.0, 1024);
  CHECK(is_bell_shaped(uniform, 1e-12).ok);  // weakly decreasing
}

TEST_CASE("convolution: Gaussian closed form to 1e-6 sup error") {
  const int bins = 1 << 14;
  GridDensity f = gaussian_grid(0.5, 12.0, bins);
  GridDensity conv = convolve(f, f);
  double sup = 0;
  for (int j = 0; j <= conv.bins; ++j) {
    double t = conv.node(j);
    double exact = std::exp(-t * t / 2.0) / std::sqrt(2.0 * M_PI);
    sup = std::max(sup, std::abs(conv.values[static_cast<std::size_t>(j)] - exact));
  }
  CHECK(sup < 1e-6);
  CHECK(conv.mass() == doctest::Approx(f.mass() * f.mass()).epsilon(1e-9));
}

TEST_CASE("convolving against a narrowing bump converges to the identity") {
  SceneryDistribution d(1.5, 1.0);
  const int bins = 8192;
  const double w = 12.0;
  GridDensity f = render_density(d, w, bins);
  double prev_err = 1.0;
  for (double sigma : {0.1, 0.05, 0.025}) {
    GridDensity bump = gaussian_grid(sigma * sigma, w, bins);
    GridDensity conv = convolve(f, bump);
    double sup = 0;
    for (int j = 0; j <= conv.bins; ++j)
      sup = std::max(sup, std::abs(conv.values[static_cast<std::size_t>(j)] -
                                   f.value_at(conv.node(j))));
    CHECK(sup < prev_err);
    prev_err = sup;
  }
  CHECK(prev_err < 2e-3);
}

TEST_CASE("exponential-power convolutions stay bell-shaped") {
  SplitMix64 rng = replica_stream(17, 0);
  for (int i = 0; i < 8; ++i) {
    SceneryDistribution f(1.0 + 2.0 * uniform01(rng), 0.5 + 1.5 * uniform01(rng));
    SceneryDistribution g(1.0 + 2.0 * uniform01(rng), 0.5 + 1.5 * uniform01(rng));
    double w = std::max(tail_cutoff(f, 1e-9), tail_cutoff(g, 1e-9));
    GridDensity conv = convolve(render_density(f, w, 4096), render_density(g, w, 4096));
    CHECK(is_bell_shaped(conv, 1e-9).ok);
  }
}

TEST_CASE("weighted tail: single coefficient reduces to the scalar tail") {
  SceneryDistribution d(1.5, 1.0);
  const double c = 0.8, y = 1.2;
  double exact = std::exp(log_tail(d, y / c));
  double grid = weighted_tail_grid({c}, d, y);
  CHECK(grid == doctest::Approx(exact).epsilon(1e-4));
  TailEstimate mc = weighted_tail_mc({c}, d, y, 200000, 33);
  CHECK(std::abs(mc.p() - exact) <= 4.0 * mc.se());
}

TEST_CASE("weighted tail: four unit coefficients hit the Gaussian oracle") {
  SceneryDistribution gauss(2.0, 1.0);
  // Sum of four N(0, 1/2) is N(0, 2); P(S > 2) = Phi_bar(sqrt 2).
  double oracle = oracles::normal_upper_tail(std::sqrt(2.0));
  CHECK(oracle == doctest::Approx(0.0786).epsilon(1e-3));
  double grid = weighted_tail_grid({1, 1, 1, 1}, gauss, 2.0);
  CHECK(grid == doctest::Approx(oracle).epsilon(1e-4));
  TailEstimate mc = weighted_tail_mc({1, 1, 1, 1}, gauss, 2.0, 300000, 35);
  CHECK(std::abs(mc.p() - oracle) <= 4.0 * mc.se());
}

TEST_CASE("scaling sandwich around mixed coefficients") {
  SceneryDistribution d(1.5, 1.0);
  std::vector<double> coeffs{0.5, 0.8, 1.2};
  const double y = 1.5;
  double mid = weighted_tail_grid(coeffs, d, y);
  double lo = weighted_tail_grid({1, 1, 1}, d, y / 0.5);
  double hi = weighted_tail_grid({1, 1, 1}, d, y / 1.2);
  CHECK(lo <= mid + 1e-6);
  CHECK(mid <= hi + 1e-6);
}

TEST_CASE("coefficient monotonicity in distribution under common random numbers") {
  SplitMix64 rng = replica_stream(271, 0);
  for (int trial = 0; trial < 10; ++trial) {
    SceneryDistribution d(1.0 + 1.5 * uniform01(rng), 1.0);
    int len = 2 + static_cast<int>(uniform_below(rng, 7));
    std::vector<double> a, b;
    for (int i = 0; i < len; ++i) {
      double base = 0.2 + uniform01(rng);
      a.push_back(base);
      b.push_back(base + uniform01(rng));
    }
    double y = 0.5 + 2.0 * uniform01(rng);
    std::uint64_t seed = 5000 + static_cast<std::uint64_t>(trial);
    TailEstimate ta = weighted_tail_mc(a, d, y, 40000, seed);
    TailEstimate tb = weighted_tail_mc(b, d, y, 40000, seed);
    double sigma = std::sqrt(ta.variance + tb.variance) + 1e-12;
    CHECK(ta.p() <= tb.p() + 2.0 * sigma);
  }
}

TEST_CASE("method dispatcher routes to both tails") {
  SceneryDistribution d(1.5, 1.0);
  double grid = weighted_tail({1.0, 0.5}, d, 1.0, TailMethod::kGrid, 0, 0);
  double mc = weighted_tail({1.0, 0.5}, d, 1.0, TailMethod::kMonteCarlo, 100000, 9);
  CHECK(grid > 0.0);
  CHECK(std::abs(grid - mc) < 0.01);
}

TEST_CASE("grid method input guards") {
  SceneryDistribution d(1.5, 1.0);
  CHECK_THROWS_AS(weighted_tail_grid({}, d, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_tail_grid(std::vector<double>(33, 1.0), d, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(convolve(gaussian_grid(0.5, 8.0, 1024), gaussian_grid(0.5, 8.0, 512)),
                  std::invalid_argument);
}

TEST_CASE("symmetric-sum identity: degenerate, Gaussian, exponential-power") {
  // Narrow eta: both sides collapse to P(xi > y).
  {
    GridDensity f = gaussian_grid(0.5, 12.0, 8192);
    GridDensity bump = gaussian_grid(1e-4, 12.0, 8192);
    CHECK(symmetric_sum_identity_check(f, bump, 1.0) < 5e-4);
  }
  // Two Gaussians at y = 1.
  {
    GridDensity f = gaussian_grid(0.5, 12.0, 8192);
    CHECK(symmetric_sum_identity_check(f, f, 1.0) < 1e-6);
  }
  // Exponential-power pair at the stated y grid.
  {
    SceneryDistribution d(1.5, 1.0);
    GridDensity g = render_density(d, 12.0, 8192);
    for (double y : {0.5, 1.0, 2.0})
      CHECK(symmetric_sum_identity_check(g, g, y) < 1e-5);
  }
}
