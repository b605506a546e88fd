// Symmetric exponential-power scenery eta with density proportional to
// exp(-c_alpha |t|^alpha): sampling, exact tail, log-MGF, tilted draws, and
// the Kasahara asymptote of the log-MGF.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

/// (alpha, c_alpha) parameterization of the scenery law. The density is
/// f(t) = exp(-c_alpha |t|^alpha) / Z with Z = 2 Gamma(1 + 1/alpha) /
/// c_alpha^{1/alpha}, which is bell-shaped for every alpha >= 1 and has
/// log-tail ~ -c_alpha t^alpha.
struct SceneryDistribution {
  double alpha;
  double c_alpha;

  SceneryDistribution(double alpha_in, double c_in);

  double a() const { return alpha / (alpha + 1.0); }  // speed exponent
  double b() const { return 1.0 / (alpha + 1.0); }

  /// Dual exponent: 1/alpha + 1/alpha_bar = 1; +infinity when alpha = 1.
  double alpha_bar() const;

  double log_norm() const;  // log Z
  double log_density(double t) const;
  double density(double t) const;
};

/// i.i.d. draws via |eta| = (G / c_alpha)^{1/alpha}, G ~ Gamma(1/alpha, 1),
/// with an independent random sign.
double sample_one(const SceneryDistribution& dist, SplitMix64& rng);
std::vector<double> sample(const SceneryDistribution& dist, std::int64_t count,
                           std::uint64_t seed);

/// log P(eta > t) for t > 0, from the exact upper-tail integral: with
/// a = 1/alpha and x = c_alpha t^alpha the tail is Q(a, x) / 2.
double log_tail(const SceneryDistribution& dist, double t);

/// Lambda(lambda) = log E[exp(lambda eta)]. Closed form for alpha in {1, 2},
/// log-domain adaptive quadrature otherwise (relative tolerance 1e-9).
/// Throws for alpha = 1 when |lambda| >= c_alpha (the MGF diverges).
double log_mgf(const SceneryDistribution& dist, double lambda);

/// Lambda'(lambda), the mean of the lambda-tilted law.
double log_mgf_deriv(const SceneryDistribution& dist, double lambda);

/// x^{alpha_bar} / (alpha_bar (alpha c_alpha)^{alpha_bar - 1}): the leading
/// large-x growth of Lambda by Kasahara's Tauberian theorem. alpha > 1, x > 0.
double kasahara_asymptote(const SceneryDistribution& dist, double x);

/// nu(delta) = E[eta^2 exp(delta |eta|)]; requires delta < c_alpha for
/// alpha = 1 and delta >= 0 is allowed for alpha > 1 always.
double moment_nu(const SceneryDistribution& dist, double delta);

/// Draws from the theta-tilted law, density proportional to
/// exp(theta t - c_alpha |t|^alpha). Exact two-sided-exponential mixture for
/// alpha = 1, exact Gaussian for alpha = 2, tangent-envelope rejection on the
/// concave log-density otherwise. Construction cost is paid once per theta.
class TiltedSampler {
 public:
  TiltedSampler(const SceneryDistribution& dist, double theta);

  double operator()(SplitMix64& rng) const;

 private:
  enum class Kind { kLaplace, kGauss, kEnvelope };
  Kind kind_;
  double alpha_ = 0, c_ = 0, theta_ = 0;
  // kLaplace
  double p_pos_ = 0, rate_pos_ = 0, rate_neg_ = 0;
  // kGauss
  double mean_ = 0, sd_ = 0;
  // kEnvelope: flat top on [a_, b_], exponential tails with tangent slopes
  double a_ = 0, b_ = 0, phi_m_ = 0, phi_a_ = 0, phi_b_ = 0;
  double slope_l_ = 0, slope_r_ = 0;
  double w_left_ = 0, w_mid_ = 0, w_right_ = 0;  // cumulative piece masses

  double phi(double t) const;
};

/// Lazily materialized scenery: the value at site x is a pure function of
/// (seed, site hash), so queries are consistent within a replica without
/// storing the whole field. A small cache skips the resample on repeat hits.
class SceneryField {
 public:
  SceneryField(const SceneryDistribution& dist, std::uint64_t seed)
      : dist_(dist), seed_(seed) {}

  double value(const Site& s);

  const SceneryDistribution& distribution() const { return dist_; }

 private:
  SceneryDistribution dist_;
  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace rwrs
