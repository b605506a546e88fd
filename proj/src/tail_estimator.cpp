#include "rwrs/tail_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwrs/parallel.hpp"

namespace rwrs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPcSalt = 0x8e5cddb3a1b1c0efULL;

double lambda_prime(const SceneryDistribution& dist, double theta) {
  return log_mgf_deriv(dist, theta);
}

double solve_tilt(const std::vector<std::int64_t>& counts,
                  const SceneryDistribution& dist, double target, double margin) {
  if (!(target > 0.0))
    throw std::invalid_argument("tilting_parameter requires target > 0");
  std::int64_t lmax = 0;
  for (std::size_t l = 0; l < counts.size(); ++l)
    if (counts[l] > 0) lmax = static_cast<std::int64_t>(l);
  if (lmax == 0) throw std::invalid_argument("tilting_parameter: empty local times");

  auto g = [&](double lam) {
    double s = 0.0;
    for (std::size_t l = 1; l < counts.size(); ++l)
      if (counts[l] > 0)
        s += static_cast<double>(counts[l]) * static_cast<double>(l) *
             lambda_prime(dist, lam * static_cast<double>(l));
    return s;
  };

  double hi;
  if (dist.alpha == 1.0) {
    hi = dist.c_alpha * (1.0 - margin) / static_cast<double>(lmax);
    if (g(hi) < target)
      throw TargetUnreachable("target-unreachable: target beyond capped tilt");
  } else {
    hi = 1.0;
    while (g(hi) < target) {
      hi *= 2.0;
      if (hi > 1e3)
        throw TargetUnreachable("target-unreachable: bracketing exceeded lambda_max");
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 80 && (hi - lo) > 1e-8 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Spiked walk proposal: prepend k excursions conditioned to return within
// excursion_cap steps without leaving ball(escape_radius), k mixed over
// {0, 1..spike_max}. dP/dQ is exact given the excursion acceptance
// probability p_c; see generate_outer_walk.

struct SpikePlan {
  int spike_max = 0;
  std::int64_t excursion_cap = 0;
  std::int64_t escape_radius = 0;
  std::int64_t t_cap = 0;  // spike phase confined to the first t_cap steps
  double rho0 = 0.5;       // proposal mass on k = 0
  double log_pc = 0.0;
};

// One excursion attempt from the origin. Appends visited sites to scratch on
// success and returns the length; returns -1 on disqualification.
std::int64_t attempt_excursion(const WalkConfig& cfg, SplitMix64& rng,
                               std::int64_t cap, std::int64_t radius,
                               std::vector<Site>& scratch) {
  scratch.clear();
  Site s;
  for (std::int64_t step = 1; step <= cap; ++step) {
    apply_step(cfg, rng, s);
    scratch.push_back(s);
    bool at0 = true;
    for (int i = 0; i < kMaxDim; ++i)
      if (s.c[i] != 0) {
        at0 = false;
        break;
      }
    if (at0) return step;
    if (sup_norm(s) > radius) return -1;
  }
  return -1;
}

double estimate_log_pc(const WalkConfig& cfg, const SpikePlan& plan,
                       std::int64_t replicas, std::uint64_t seed) {
  std::int64_t hits = parallel_reduce(
      replicas, 16384, std::int64_t{0},
      [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t h = 0;
        std::vector<Site> scratch;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          if (attempt_excursion(cfg, rng, plan.excursion_cap, plan.escape_radius,
                                scratch) > 0)
            ++h;
        }
        return h;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  if (hits == 0)
    throw std::runtime_error("spike proposal: excursion acceptance estimated 0");
  return std::log(static_cast<double>(hits) / static_cast<double>(replicas));
}

// Generates one outer walk into lt and returns log dP/dQ (0 when the plan is
// null). The proposal draws k, prepends k conditioned excursions while the
// cumulative spike time stays under t_cap - excursion_cap, then runs the walk
// freely. The weight needs the path's maximal initial streak of qualifying
// excursions and whether the streak ended by the time-cap rule or by an
// unqualifying excursion.
double generate_outer_walk(const WalkConfig& cfg, std::int64_t n, SplitMix64& rng,
                           LocalTimeField& lt, const SpikePlan* plan,
                           std::vector<Site>& scratch) {
  lt.clear();
  Site pos;
  lt.add_visit(pos);
  if (plan == nullptr || plan->spike_max == 0) {
    for (std::int64_t t = 0; t < n; ++t) {
      apply_step(cfg, rng, pos);
      lt.add_visit(pos);
    }
    return 0.0;
  }

  const std::int64_t cap_limit = plan->t_cap - plan->excursion_cap;
  int k = 0;
  if (uniform01(rng) >= plan->rho0)
    k = 1 + static_cast<int>(uniform_below(
                rng, static_cast<std::uint64_t>(plan->spike_max)));

  std::int64_t t = 0;
  std::int64_t streak = 0;
  bool capped = false;
  while (streak < k) {
    if (t > cap_limit) {
      capped = true;
      break;
    }
    std::int64_t len;
    while ((len = attempt_excursion(cfg, rng, plan->excursion_cap,
                                    plan->escape_radius, scratch)) < 0) {
    }
    for (const Site& s : scratch) lt.add_visit(s);
    t += len;
    ++streak;
  }

  // Free phase; keep extending the qualifying streak while it stays alive.
  bool alive = !capped;
  if (alive && t > cap_limit) {
    alive = false;
    capped = true;
  }
  std::int64_t gap = 0;
  bool inball = true;
  pos = Site{};
  for (std::int64_t step = t; step < n; ++step) {
    apply_step(cfg, rng, pos);
    lt.add_visit(pos);
    if (!alive) continue;
    ++gap;
    if (sup_norm(pos) > plan->escape_radius) {
      alive = false;  // this excursion can no longer qualify
      continue;
    }
    bool at0 = true;
    for (int i = 0; i < kMaxDim; ++i)
      if (pos.c[i] != 0) {
        at0 = false;
        break;
      }
    if (at0) {
      if (gap <= plan->excursion_cap) {
        ++streak;
        t += gap;
        gap = 0;
        if (t > cap_limit) {
          alive = false;
          capped = true;
        }
      } else {
        alive = false;
      }
    } else if (gap >= plan->excursion_cap) {
      alive = false;
    }
  }
  // A streak still alive at the end of the path means the next excursion is
  // incomplete, hence unqualifying: capped stays false.

  // log dQ/dP = logsumexp over k' of log rho(k') - j_{k'} log p_c, where
  // j_{k'} = min(k', streak), and k' > streak contributes only when the
  // streak ended by the cap rule.
  const double log_rho0 = std::log(plan->rho0);
  const double log_rho_k =
      std::log((1.0 - plan->rho0) / static_cast<double>(plan->spike_max));
  const std::int64_t s_top = std::min<std::int64_t>(streak, plan->spike_max);
  double max_term = -kInf;
  auto term = [&](std::int64_t kp) {
    double lr = (kp == 0) ? log_rho0 : log_rho_k;
    return lr - static_cast<double>(kp) * plan->log_pc;
  };
  for (std::int64_t kp = 0; kp <= s_top; ++kp) max_term = std::max(max_term, term(kp));
  double tail_term = -kInf;
  if (capped && streak < plan->spike_max) {
    double mass = (1.0 - plan->rho0) *
                  static_cast<double>(plan->spike_max - streak) /
                  static_cast<double>(plan->spike_max);
    tail_term = std::log(mass) - static_cast<double>(streak) * plan->log_pc;
    max_term = std::max(max_term, tail_term);
  }
  double acc = 0.0;
  for (std::int64_t kp = 0; kp <= s_top; ++kp)
    acc += std::exp(term(kp) - max_term);
  if (std::isfinite(tail_term)) acc += std::exp(tail_term - max_term);
  double log_dq_dp = max_term + std::log(acc);
  return -log_dq_dp;
}

SpikePlan make_plan(std::int64_t n, const TiltedOptions& opt) {
  SpikePlan plan;
  plan.spike_max = opt.spike_max;
  plan.excursion_cap = opt.spike_excursion_cap > 0
                           ? opt.spike_excursion_cap
                           : std::clamp<std::int64_t>(n / 8, 8, 2048);
  plan.excursion_cap = std::min(plan.excursion_cap, std::max<std::int64_t>(1, n / 4));
  plan.escape_radius = opt.spike_escape_radius;
  plan.t_cap = n / 2;
  plan.rho0 = opt.spike_defensive_weight;
  return plan;
}

}  // namespace

double tilting_parameter(const std::vector<std::int64_t>& counts,
                         const SceneryDistribution& dist, double target) {
  return solve_tilt(counts, dist, target, 1e-9);
}

double tilting_parameter(const LocalTimeField& lt, const SceneryDistribution& dist,
                         double target) {
  return solve_tilt(lt.count_histogram(), dist, target, 1e-9);
}

TailEstimate naive_tail(const WalkConfig& cfg, const SceneryDistribution& dist,
                        std::int64_t n, double y, std::int64_t replicas,
                        std::uint64_t seed) {
  cfg.validate();
  if (!(y > 0.0)) throw std::invalid_argument("naive_tail requires y > 0");
  const double target = static_cast<double>(n) * y;
  std::int64_t hits = parallel_reduce(
      replicas, 2048, std::int64_t{0},
      [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t h = 0;
        LocalTimeField lt(cfg.dimension, n + 1);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          lt.clear();
          SplitMix64 wrng = replica_stream(seed, 2 * static_cast<std::uint64_t>(rep));
          SplitMix64 erng =
              replica_stream(seed, 2 * static_cast<std::uint64_t>(rep) + 1);
          accumulate_walk(cfg, n, wrng, lt);
          double x = 0.0;
          for (const auto& e : lt.entries())
            x += static_cast<double>(e.count) * sample_one(dist, erng);
          if (x >= target) ++h;
        }
        return h;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  return binomial_estimate(hits, replicas, EstimatorId::kNaive, seed);
}

TailEstimate tilted_tail(const WalkConfig& cfg, const SceneryDistribution& dist,
                         std::int64_t n, double y, std::int64_t outer_replicas,
                         std::int64_t inner_replicas, std::uint64_t seed,
                         const TiltedOptions& options) {
  cfg.validate();
  if (!(y > 0.0)) throw std::invalid_argument("tilted_tail requires y > 0");
  if (inner_replicas < 1)
    throw std::invalid_argument("tilted_tail requires inner_replicas >= 1");
  const double target = static_cast<double>(n) * y;

  SpikePlan plan = make_plan(n, options);
  const bool spiked = plan.spike_max > 0;
  if (spiked)
    plan.log_pc = estimate_log_pc(cfg, plan, options.pc_replicas,
                                  mix64(seed ^ kPcSalt));

  LogAccumulator acc = parallel_reduce(
      outer_replicas, 1024, LogAccumulator{},
      [&](std::int64_t lo, std::int64_t hi) {
        LogAccumulator block;
        LocalTimeField lt(cfg.dimension, n + 1);
        std::vector<Site> scratch;
        std::vector<double> log_mgf_by_l;
        std::vector<TiltedSampler> samplers;
        std::vector<std::size_t> sampler_of_l;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          double log_lr = generate_outer_walk(cfg, n, rng, lt,
                                              spiked ? &plan : nullptr, scratch);
          auto counts = lt.count_histogram();
          double lam = solve_tilt(counts, dist, target, options.tilt_margin);

          // Per-distinct-local-time tilt data.
          double sum_mgf = 0.0;
          samplers.clear();
          sampler_of_l.assign(counts.size(), 0);
          log_mgf_by_l.assign(counts.size(), 0.0);
          for (std::size_t l = 1; l < counts.size(); ++l) {
            if (counts[l] == 0) continue;
            double theta = lam * static_cast<double>(l);
            log_mgf_by_l[l] = log_mgf(dist, theta);
            sum_mgf += static_cast<double>(counts[l]) * log_mgf_by_l[l];
            sampler_of_l[l] = samplers.size();
            samplers.emplace_back(dist, theta);
          }

          LogAccumulator inner;
          for (std::int64_t i = 0; i < inner_replicas; ++i) {
            double x = 0.0;
            for (std::size_t l = 1; l < counts.size(); ++l) {
              if (counts[l] == 0) continue;
              const TiltedSampler& ts = samplers[sampler_of_l[l]];
              double s = 0.0;
              for (std::int64_t j = 0; j < counts[l]; ++j) s += ts(rng);
              x += static_cast<double>(l) * s;
            }
            if (x >= target) inner.add(-lam * x + sum_mgf);
          }
          double log_m = inner.empty_mass()
                             ? -kInf
                             : inner.log_sum() -
                                   std::log(static_cast<double>(inner_replicas));
          block.add(log_lr + log_m);
        }
        return block;
      },
      [](LogAccumulator a, const LogAccumulator& b) {
        a.merge(b);
        return a;
      });

  TailEstimate e;
  e.replicas = outer_replicas;
  e.id = EstimatorId::kTilted;
  e.seed = seed;
  e.log_p = acc.log_mean();
  e.se_log = acc.relative_se();
  double p = std::exp(e.log_p);
  e.variance = (p * e.se_log) * (p * e.se_log);
  return e;
}

std::pair<double, double> tilted_weight_normalization(
    const WalkConfig& cfg, const SceneryDistribution& dist, std::int64_t n,
    double y, std::int64_t inner_replicas, std::uint64_t seed) {
  LocalTimeField lt = simulate_local_times(cfg, n, seed);
  auto counts = lt.count_histogram();
  const double target = static_cast<double>(n) * y;
  double lam = solve_tilt(counts, dist, target, 1e-9);
  double sum_mgf = 0.0;
  std::vector<TiltedSampler> samplers;
  std::vector<std::size_t> sampler_of_l(counts.size(), 0);
  for (std::size_t l = 1; l < counts.size(); ++l) {
    if (counts[l] == 0) continue;
    double theta = lam * static_cast<double>(l);
    sum_mgf += static_cast<double>(counts[l]) * log_mgf(dist, theta);
    sampler_of_l[l] = samplers.size();
    samplers.emplace_back(dist, theta);
  }
  SplitMix64 rng = replica_stream(seed, 1);
  double s1 = 0.0, s2 = 0.0;
  for (std::int64_t i = 0; i < inner_replicas; ++i) {
    double x = 0.0;
    for (std::size_t l = 1; l < counts.size(); ++l) {
      if (counts[l] == 0) continue;
      const TiltedSampler& ts = samplers[sampler_of_l[l]];
      for (std::int64_t j = 0; j < counts[l]; ++j)
        x += static_cast<double>(l) * ts(rng);
    }
    double w = std::exp(-lam * x + sum_mgf);
    s1 += w;
    s2 += w * w;
  }
  double m = s1 / static_cast<double>(inner_replicas);
  double var = s2 / static_cast<double>(inner_replicas) - m * m;
  double se = std::sqrt(std::max(0.0, var) / static_cast<double>(inner_replicas));
  return {m, se};
}

LowerBoundResult lower_bound(const ReturnTimeCdf& cdf,
                             const SceneryDistribution& dist, std::int64_t n,
                             double y, std::int64_t k) {
  if (!(y > 0.0)) throw std::invalid_argument("lower_bound requires y > 0");
  const double ny = static_cast<double>(n) * y;
  if (k <= 0) k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(
                                                std::pow(ny, dist.a()))));
  double bracket = std::exp(-cdf.kappa0()) - cdf.prob_late_return(n / k);
  if (!(bracket > 0.0))
    throw std::runtime_error(
        "lower_bound: return bracket <= 0 (n too small for chosen k)");
  LowerBoundResult r;
  r.k = k;
  r.log_walk_part = static_cast<double>(k) * std::log(bracket);
  r.log_scenery_part = log_tail(dist, ny / static_cast<double>(k));
  r.log_bound = r.log_walk_part + r.log_scenery_part;
  return r;
}

LowerBoundResult lower_bound(const WalkConfig& cfg, const SceneryDistribution& dist,
                             std::int64_t n, double y, std::int64_t k,
                             std::int64_t cdf_replicas, std::int64_t cdf_horizon,
                             std::uint64_t seed) {
  ReturnTimeCdf cdf = estimate_return_cdf(cfg, cdf_replicas, cdf_horizon, seed);
  return lower_bound(cdf, dist, n, y, k);
}

std::vector<LowerBoundResult> scan_lower_bound(const ReturnTimeCdf& cdf,
                                               const SceneryDistribution& dist,
                                               std::int64_t n, double y,
                                               std::int64_t k_max) {
  std::vector<LowerBoundResult> out;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    double bracket = std::exp(-cdf.kappa0()) - cdf.prob_late_return(n / k);
    if (!(bracket > 0.0)) break;
    out.push_back(lower_bound(cdf, dist, n, y, k));
  }
  return out;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& n_and_log_p,
                         double y) {
  if (n_and_log_p.size() < 3)
    throw std::invalid_argument("fit_exponent needs at least 3 points");
  ExponentFit fit;
  for (const auto& [n, log_p] : n_and_log_p) {
    if (!(log_p < 0.0) || !std::isfinite(log_p))
      throw std::invalid_argument(
          "fit_exponent: probabilities must lie strictly inside (0, 1)");
    fit.points.emplace_back(std::log(n * y), std::log(-log_p));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.points.size());
  for (const auto& [x, v] : fit.points) {
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  double rss = 0;
  for (const auto& [x, v] : fit.points) {
    double r = v - fit.slope * x - fit.intercept;
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

ExponentPipelineResult run_exponent_pipeline(const ExponentPipelineConfig& cfg) {
  if (cfg.n_values.size() < 3)
    throw std::invalid_argument("exponent pipeline needs >= 3 n values");
  ExponentPipelineResult out;
  ReturnTimeCdf cdf = estimate_return_cdf(cfg.walk, cfg.cdf_replicas,
                                          cfg.cdf_horizon, mix64(cfg.seed ^ 0x1d));
  out.p_ret = cdf.p_ret();
  out.kappa0 = cdf.kappa0();

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    std::int64_t n = cfg.n_values[i];
    const double ny = static_cast<double>(n) * cfg.y;
    TiltedOptions opt;
    if (cfg.spike) {
      // Optimal single-site pile-up is of order
      // (alpha c_alpha (ny)^alpha / kappa0)^{1/(alpha+1)}; cover it with slack.
      double k_star = std::pow(
          cfg.dist.alpha * cfg.dist.c_alpha * std::pow(ny, cfg.dist.alpha) /
              out.kappa0,
          1.0 / (cfg.dist.alpha + 1.0));
      opt.spike_max = std::max(4, static_cast<int>(std::ceil(1.7 * k_star)));
    }
    TailEstimate e =
        tilted_tail(cfg.walk, cfg.dist, n, cfg.y, cfg.outer_replicas,
                    cfg.inner_replicas, mix64(cfg.seed ^ (0x9e37 + i)), opt);
    out.estimates.push_back(e);
    out.bounds.push_back(lower_bound(cdf, cfg.dist, n, cfg.y));
    fit_points.emplace_back(static_cast<double>(n), e.log_p);
  }
  out.fit = fit_exponent(fit_points, cfg.y);
  return out;
}

}  // namespace rwrs
