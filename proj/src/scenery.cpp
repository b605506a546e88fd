#include "rwrs/scenery.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwrs/quadrature.hpp"

namespace rwrs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-9;
}  // namespace

SceneryDistribution::SceneryDistribution(double alpha_in, double c_in)
    : alpha(alpha_in), c_alpha(c_in) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("scenery tail exponent alpha must be >= 1");
  if (!(c_alpha > 0.0))
    throw std::invalid_argument("scenery tail constant c_alpha must be > 0");
}

double SceneryDistribution::alpha_bar() const {
  if (alpha == 1.0) return kInf;
  return alpha / (alpha - 1.0);
}

double SceneryDistribution::log_norm() const {
  return std::log(2.0) + std::lgamma(1.0 + 1.0 / alpha) -
         std::log(c_alpha) / alpha;
}

double SceneryDistribution::log_density(double t) const {
  return -c_alpha * std::pow(std::abs(t), alpha) - log_norm();
}

double SceneryDistribution::density(double t) const {
  return std::exp(log_density(t));
}

double sample_one(const SceneryDistribution& dist, SplitMix64& rng) {
  double g = gamma_variate(rng, 1.0 / dist.alpha);
  double mag = std::pow(g / dist.c_alpha, 1.0 / dist.alpha);
  return (rng() >> 63) ? mag : -mag;
}

std::vector<double> sample(const SceneryDistribution& dist, std::int64_t count,
                           std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("sample count must be >= 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  SplitMix64 rng = replica_stream(seed, 0);
  for (std::int64_t i = 0; i < count; ++i) out.push_back(sample_one(dist, rng));
  return out;
}

double log_tail(const SceneryDistribution& dist, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("log_tail requires t > 0");
  double x = dist.c_alpha * std::pow(t, dist.alpha);
  return log_gamma_q(1.0 / dist.alpha, x) - std::log(2.0);
}

double log_mgf(const SceneryDistribution& dist, double lambda) {
  const double c = dist.c_alpha, al = dist.alpha;
  if (al == 1.0) {
    if (std::abs(lambda) >= c)
      throw std::domain_error("MGF diverges: alpha = 1 requires |lambda| < c_alpha");
    double r = lambda / c;
    return -std::log1p(-r * r);
  }
  if (al == 2.0) return lambda * lambda / (4.0 * c);
  if (lambda == 0.0) return 0.0;
  double la = std::abs(lambda);
  // Peak of lambda t - c t^alpha on t > 0.
  double mode = std::pow(la / (c * al), 1.0 / (al - 1.0));
  auto phi = [&](double t) { return la * t - c * std::pow(std::abs(t), al); };
  return log_integral_exp(phi, -kInf, kInf, mode, kQuadTol) - dist.log_norm();
}

double log_mgf_deriv(const SceneryDistribution& dist, double lambda) {
  const double c = dist.c_alpha, al = dist.alpha;
  if (al == 1.0) {
    if (std::abs(lambda) >= c)
      throw std::domain_error("MGF diverges: alpha = 1 requires |lambda| < c_alpha");
    return 2.0 * lambda / (c * c - lambda * lambda);
  }
  if (al == 2.0) return lambda / (2.0 * c);
  if (lambda == 0.0) return 0.0;
  double la = std::abs(lambda);
  double mode = std::pow(la / (c * al), 1.0 / (al - 1.0));
  auto phi = [&](double t) { return la * t - c * std::pow(std::abs(t), al); };
  double log_den = log_integral_exp(phi, -kInf, kInf, mode, kQuadTol);
  // Positive and negative parts of the first-moment integral, each with a
  // positive log-unimodal integrand.
  auto phi_pos = [&](double t) { return std::log(t) + phi(t); };
  auto phi_neg = [&](double t) { return std::log(t) + phi(-t); };
  double log_pos = log_integral_exp(phi_pos, 0.0, kInf, std::max(mode, 1.0), kQuadTol);
  double log_neg = log_integral_exp(phi_neg, 0.0, kInf, 1.0, kQuadTol);
  double deriv = std::exp(log_pos - log_den) - std::exp(log_neg - log_den);
  return lambda >= 0.0 ? deriv : -deriv;
}

double kasahara_asymptote(const SceneryDistribution& dist, double x) {
  if (dist.alpha == 1.0)
    throw std::domain_error("Kasahara asymptote requires alpha > 1");
  if (!(x > 0.0)) throw std::invalid_argument("kasahara_asymptote requires x > 0");
  double ab = dist.alpha_bar();
  return std::pow(x, ab) /
         (ab * std::pow(dist.alpha * dist.c_alpha, ab - 1.0));
}

double moment_nu(const SceneryDistribution& dist, double delta) {
  const double c = dist.c_alpha, al = dist.alpha;
  if (delta < 0.0) throw std::invalid_argument("moment_nu requires delta >= 0");
  if (al == 1.0 && delta >= c)
    throw std::domain_error("nu diverges: alpha = 1 requires delta < c_alpha");
  // E[eta^2 e^{delta |eta|}] = (2/Z) * int_0^inf t^2 exp(delta t - c t^alpha).
  auto phi = [&](double t) {
    return 2.0 * std::log(t) + delta * t - c * std::pow(t, al);
  };
  double guess = std::pow(2.0 / (c * al) + delta / (c * al), 1.0 / al) + 1.0;
  double log_i = log_integral_exp(phi, 0.0, kInf, guess, kQuadTol);
  return std::exp(std::log(2.0) + log_i - dist.log_norm());
}

// ---------------------------------------------------------------------------
// Tilted sampling

double TiltedSampler::phi(double t) const {
  return theta_ * t - c_ * std::pow(std::abs(t), alpha_);
}

TiltedSampler::TiltedSampler(const SceneryDistribution& dist, double theta)
    : alpha_(dist.alpha), c_(dist.c_alpha), theta_(theta) {
  if (alpha_ == 1.0) {
    if (std::abs(theta) >= c_)
      throw std::domain_error("tilted law undefined: |theta| >= c_alpha at alpha = 1");
    kind_ = Kind::kLaplace;
    rate_pos_ = c_ - theta;   // density on t > 0: proportional to e^{-(c-theta) t}
    rate_neg_ = c_ + theta;
    double mass_pos = 1.0 / rate_pos_, mass_neg = 1.0 / rate_neg_;
    p_pos_ = mass_pos / (mass_pos + mass_neg);
    return;
  }
  if (alpha_ == 2.0) {
    kind_ = Kind::kGauss;
    mean_ = theta / (2.0 * c_);
    sd_ = 1.0 / std::sqrt(2.0 * c_);
    return;
  }
  kind_ = Kind::kEnvelope;
  // Mode of the concave log-density.
  double th = std::abs(theta);
  double mode = th == 0.0 ? 0.0
                          : std::pow(th / (c_ * alpha_), 1.0 / (alpha_ - 1.0));
  if (theta < 0.0) mode = -mode;
  phi_m_ = phi(mode);
  // Points where the log-density has dropped by one nat from the mode.
  auto drop_point = [&](int dir) {
    double s = 1.0;
    while (phi(mode + dir * s) > phi_m_ - 1.0) s *= 2.0;
    double in = 0.0, out = s;
    for (int i = 0; i < 60; ++i) {
      double mid = 0.5 * (in + out);
      if (phi(mode + dir * mid) > phi_m_ - 1.0)
        in = mid;
      else
        out = mid;
    }
    return mode + dir * out;
  };
  a_ = drop_point(-1);
  b_ = drop_point(+1);
  phi_a_ = phi(a_);
  phi_b_ = phi(b_);
  auto dphi = [&](double t) {
    return theta_ - c_ * alpha_ * std::copysign(std::pow(std::abs(t), alpha_ - 1.0), t);
  };
  slope_l_ = dphi(a_);   // > 0 left of the mode
  slope_r_ = dphi(b_);   // < 0 right of the mode
  double m_left = std::exp(phi_a_ - phi_m_) / slope_l_;
  double m_mid = b_ - a_;
  double m_right = std::exp(phi_b_ - phi_m_) / (-slope_r_);
  double tot = m_left + m_mid + m_right;
  w_left_ = m_left / tot;
  w_mid_ = (m_left + m_mid) / tot;
  w_right_ = 1.0;
}

double TiltedSampler::operator()(SplitMix64& rng) const {
  switch (kind_) {
    case Kind::kLaplace: {
      if (uniform01(rng) < p_pos_) return exponential(rng) / rate_pos_;
      return -exponential(rng) / rate_neg_;
    }
    case Kind::kGauss:
      return mean_ + sd_ * normal(rng);
    case Kind::kEnvelope:
      break;
  }
  for (;;) {
    double u = uniform01(rng);
    double t, log_env;
    if (u < w_left_) {
      t = a_ - exponential(rng) / slope_l_;
      log_env = phi_a_ + slope_l_ * (t - a_);
    } else if (u < w_mid_) {
      t = a_ + uniform01(rng) * (b_ - a_);
      log_env = phi_m_;
    } else {
      t = b_ + exponential(rng) / (-slope_r_);
      log_env = phi_b_ + slope_r_ * (t - b_);
    }
    if (std::log(uniform01(rng) + 1e-300) < phi(t) - log_env) return t;
  }
}

double SceneryField::value(const Site& s) {
  std::uint64_t h = site_hash(s);
  auto it = cache_.find(h);
  if (it != cache_.end()) return it->second;
  SplitMix64 rng(mix64(seed_ ^ h));
  double v = sample_one(dist_, rng);
  cache_.emplace(h, v);
  return v;
}

}  // namespace rwrs
