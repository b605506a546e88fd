#include "rwrs/rwrs_process.hpp"

#include <cmath>
#include <stdexcept>

#include "rwrs/parallel.hpp"

namespace rwrs {

namespace {

// Neumaier-compensated accumulator.
struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

constexpr std::uint64_t kScenerySalt = 0xd1b54a32d192ed03ULL;

}  // namespace

double weighted_sum(const std::vector<LocalTimeField::Entry>& entries,
                    const std::vector<double>& values) {
  if (entries.size() != values.size())
    throw std::invalid_argument("weighted_sum: mismatched lengths");
  Kahan acc;
  for (std::size_t i = 0; i < entries.size(); ++i)
    acc.add(static_cast<double>(entries[i].count) * values[i]);
  return acc.value();
}

double evaluate_x(const LocalTimeField& lt, SceneryField& scenery) {
  Kahan acc;
  for (const auto& e : lt.entries())
    acc.add(static_cast<double>(e.count) * scenery.value(e.site));
  return acc.value();
}

RwrsSample sample_rwrs(const WalkConfig& cfg, const SceneryDistribution& dist,
                       std::int64_t n, std::uint64_t seed) {
  RwrsSample out{simulate_local_times(cfg, n, seed), {}, 0.0};
  SceneryField field(dist, mix64(seed ^ kScenerySalt));
  out.scenery_values.reserve(out.local_times.entries().size());
  for (const auto& e : out.local_times.entries())
    out.scenery_values.push_back(field.value(e.site));
  out.x_n = weighted_sum(out.local_times.entries(), out.scenery_values);
  return out;
}

SecondMomentEstimate second_moment(const WalkConfig& cfg,
                                   const SceneryDistribution& dist,
                                   std::int64_t n, std::int64_t replicas,
                                   std::uint64_t seed) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("second_moment requires n >= 1");
  const double eta2 = moment_nu(dist, 0.0);

  struct Acc {
    double x2 = 0.0, x4 = 0.0;       // sums of X^2 and X^4
    double l2 = 0.0;                 // sum of (sum_x l^2)
    double d = 0.0, d2 = 0.0;        // sums of D and D^2
  };
  Acc acc = parallel_reduce(
      replicas, 1024, Acc{},
      [&](std::int64_t lo, std::int64_t hi) {
        Acc a;
        LocalTimeField lt(cfg.dimension, n + 1);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          lt.clear();
          SplitMix64 walk_rng = replica_stream(seed, 2 * static_cast<std::uint64_t>(rep));
          SplitMix64 eta_rng =
              replica_stream(seed, 2 * static_cast<std::uint64_t>(rep) + 1);
          accumulate_walk(cfg, n, walk_rng, lt);
          Kahan x;
          for (const auto& e : lt.entries())
            x.add(static_cast<double>(e.count) * sample_one(dist, eta_rng));
          double xv = x.value();
          double l2 = static_cast<double>(lt.self_intersections());
          double d = xv * xv - eta2 * l2;
          a.x2 += xv * xv;
          a.x4 += xv * xv * xv * xv;
          a.l2 += l2;
          a.d += d;
          a.d2 += d * d;
        }
        return a;
      },
      [](Acc a, const Acc& b) {
        a.x2 += b.x2;
        a.x4 += b.x4;
        a.l2 += b.l2;
        a.d += b.d;
        a.d2 += b.d2;
        return a;
      });

  SecondMomentEstimate e;
  e.replicas = replicas;
  e.seed = seed;
  double r = static_cast<double>(replicas);
  e.mean_x2 = acc.x2 / r;
  e.se_x2 = std::sqrt(std::max(0.0, acc.x4 / r - e.mean_x2 * e.mean_x2) / r);
  e.decoupled = eta2 * acc.l2 / r;
  e.mean_diff = acc.d / r;
  e.se_diff = std::sqrt(std::max(0.0, acc.d2 / r - e.mean_diff * e.mean_diff) / r);
  return e;
}

}  // namespace rwrs
