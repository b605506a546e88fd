#include "rwrs/partition.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rwrs/parallel.hpp"

namespace rwrs {

namespace {

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

}  // namespace

PartitionScheme build_scheme(double alpha, int d, std::int64_t n, double y,
                             double z_threshold,
                             std::pair<double, double> chi_range) {
  if (d < 3) throw std::invalid_argument("build_scheme requires d >= 3");
  if (n < 2) throw std::invalid_argument("build_scheme requires n >= 2");
  if (!(y > 0.0)) throw std::invalid_argument("build_scheme requires y > 0");
  if (!(alpha > 1.0) || !(alpha < 0.5 * d))
    throw std::domain_error(
        "regime violation: the partition scheme needs 1 < alpha < d/2 "
        "(alpha = 1 degenerates to the three-set split of the a = b = 1/2 case)");

  PartitionScheme s;
  s.alpha = alpha;
  s.d = d;
  s.n = n;
  s.y = y;
  s.z_threshold = z_threshold;
  s.a = alpha / (alpha + 1.0);
  s.b = 1.0 / (alpha + 1.0);
  const double inv_gap = 1.0 - 2.0 / static_cast<double>(d);
  s.delta0 = (1.0 / alpha - 2.0 / static_cast<double>(d)) / inv_gap;
  s.eps0 = (s.delta0 / 2.0) / (1.0 - s.delta0 / 2.0);

  if (!(z_threshold > 0.0) || !(z_threshold < std::pow(y, s.a)))
    throw std::invalid_argument(
        "z_threshold must lie in (0, y^a) so the class intervals are ordered");

  const double log_n = std::log(static_cast<double>(n));
  const double span = (s.a - s.b) * log_n;
  // Smallest N with chi inside the window; chi decreases by (1+eps0) per step.
  if (span < chi_range.first)
    throw std::runtime_error("no admissible N: (a-b) log n below chi_range");
  int N = 1;
  double chi = span;
  while (chi > chi_range.second) {
    chi /= (1.0 + s.eps0);
    ++N;
    if (N > 4096) throw std::runtime_error("no admissible N");
  }
  if (chi < chi_range.first)
    throw std::runtime_error("no admissible N: chi window skipped over");
  s.N = N;
  s.chi = chi;

  // Gaps: z_1 = chi / log n at the top, z_2 = eps0 z_1, then geometric.
  s.z_list.resize(static_cast<std::size_t>(N));
  s.z_list[0] = s.chi / log_n;
  if (N >= 2) s.z_list[1] = s.eps0 * s.z_list[0];
  for (int i = 3; i <= N; ++i)
    s.z_list[static_cast<std::size_t>(i - 1)] =
        (1.0 + s.eps0) * s.z_list[static_cast<std::size_t>(i - 2)];

  // Thresholds walk down from b_{N+1} = a.
  s.b_list.assign(static_cast<std::size_t>(N) + 1, 0.0);
  s.b_list[static_cast<std::size_t>(N)] = s.a;
  for (int j = 1; j <= N; ++j)
    s.b_list[static_cast<std::size_t>(N - j)] =
        s.b_list[static_cast<std::size_t>(N - j + 1)] -
        s.z_list[static_cast<std::size_t>(j - 1)];

  // Budgets: y_N carries e^{chi (1 - delta0)}; beta solves the y/3 budget.
  s.y_down = y / 3.0;
  s.y_up = y / 3.0;
  std::vector<double> shape(static_cast<std::size_t>(N) + 1, 0.0);
  shape[static_cast<std::size_t>(N)] = std::exp(s.chi * (1.0 - s.delta0));
  for (int i = 0; i < N; ++i)
    shape[static_cast<std::size_t>(i)] =
        std::exp(-s.chi * s.eps0 * std::pow(1.0 + s.eps0, N - i - 1));
  double shape_sum = 0.0;
  for (double v : shape) shape_sum += v;
  s.beta = (y / 3.0) / (y * shape_sum);
  s.y_list.resize(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i)
    s.y_list[i] = s.beta * y * shape[i];

  s.gamma_list.resize(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i)
    s.gamma_list[static_cast<std::size_t>(i - 1)] =
        (s.a - s.b_list[static_cast<std::size_t>(i - 1)]) / inv_gap;

  const double ya = std::pow(y, s.a);
  s.down_threshold = z_threshold * std::pow(static_cast<double>(n), s.b);
  s.level0_upper = ya * std::pow(static_cast<double>(n), s.b);
  s.level_upper.resize(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i)
    s.level_upper[static_cast<std::size_t>(i - 1)] =
        ya * std::pow(static_cast<double>(n), s.b_list[static_cast<std::size_t>(i)]);
  s.up_threshold = std::pow(y * static_cast<double>(n), s.a);

  double viol = s.max_invariant_violation();
  if (!(viol < 1e-10))
    throw std::logic_error("partition scheme failed its own invariants");
  return s;
}

double PartitionScheme::max_invariant_violation() const {
  double v = 0.0;
  auto rel = [](double x, double ref) {
    return std::abs(x) / std::max(1.0, std::abs(ref));
  };
  // Gap recursion and sum.
  double zsum = 0.0;
  for (double z : z_list) zsum += z;
  v = std::max(v, rel(zsum - (a - b), a - b));
  if (N >= 2) v = std::max(v, rel(z_list[1] - eps0 * z_list[0], z_list[0]));
  for (int i = 3; i <= N; ++i)
    v = std::max(v, rel(z_list[static_cast<std::size_t>(i - 1)] -
                            (1.0 + eps0) * z_list[static_cast<std::size_t>(i - 2)],
                        z_list[static_cast<std::size_t>(i - 1)]));
  // chi consistency with the ladder.
  v = std::max(v, rel(chi - (a - b) * std::log(static_cast<double>(n)) /
                                std::pow(1.0 + eps0, N - 1),
                      chi));
  // Endpoints.
  v = std::max(v, rel(b_list.front() - b, 1.0));
  v = std::max(v, rel(b_list.back() - a, 1.0));
  // Budget.
  double ysum = y_down + y_up;
  for (double yi : y_list) ysum += yi;
  v = std::max(v, rel(ysum - y, y));
  // Requirement (beta y <= y_i n^{(a-b_{i+1}) - (1-delta0)(a-b_i)}), with
  // b_0 = b_1 for the i = 0 case.
  const double log_n = std::log(static_cast<double>(n));
  for (int i = 0; i <= N; ++i) {
    double bi = (i == 0) ? b_list.front() : b_list[static_cast<std::size_t>(i - 1)];
    double bip1 = (i == 0) ? b_list.front() : b_list[static_cast<std::size_t>(i)];
    double expo = (a - bip1) - (1.0 - delta0) * (a - bi);
    double rhs = y_list[static_cast<std::size_t>(i)] * std::exp(expo * log_n);
    double lhs = beta * y;
    if (lhs > rhs * (1.0 + 1e-12))
      v = std::max(v, (lhs - rhs) / std::max(1e-300, rhs));
  }
  // Monotonicity of the ladder and of gamma; the alpha < d/2 consequence.
  for (std::size_t i = 0; i + 1 < b_list.size(); ++i)
    if (b_list[i] >= b_list[i + 1]) v = std::max(v, 1.0);
  for (std::size_t i = 0; i + 1 < gamma_list.size(); ++i)
    if (gamma_list[i] < gamma_list[i + 1]) v = std::max(v, 1.0);
  if (!(a * alpha - (alpha - 1.0) * gamma0() > a)) v = std::max(v, 1.0);
  if (!(delta0 > 0.0 && delta0 < 1.0)) v = std::max(v, 1.0);
  return v;
}

void PartitionScheme::serialize(std::ostream& os) const {
  auto line = [&os](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << key << ' ' << buf << '\n';
  };
  line("alpha", alpha);
  line("y", y);
  os << "d " << d << '\n';
  os << "n " << n << '\n';
  line("a", a);
  line("b", b);
  line("delta0", delta0);
  line("eps0", eps0);
  line("chi", chi);
  line("beta", beta);
  os << "N " << N << '\n';
  line("z_threshold", z_threshold);
  line("y_down", y_down);
  line("y_up", y_up);
  for (std::size_t i = 0; i < b_list.size(); ++i)
    line(("b_" + std::to_string(i + 1)).c_str(), b_list[i]);
  for (std::size_t i = 0; i < z_list.size(); ++i)
    line(("z_" + std::to_string(i + 1)).c_str(), z_list[i]);
  for (std::size_t i = 0; i < y_list.size(); ++i)
    line(("y_" + std::to_string(i)).c_str(), y_list[i]);
  for (std::size_t i = 0; i < gamma_list.size(); ++i)
    line(("gamma_" + std::to_string(i + 1)).c_str(), gamma_list[i]);
  line("down_threshold", down_threshold);
  line("level0_upper", level0_upper);
  for (std::size_t i = 0; i < level_upper.size(); ++i)
    line(("level_upper_" + std::to_string(i + 1)).c_str(), level_upper[i]);
  line("up_threshold", up_threshold);
}

namespace {

int classify_count(double l, const PartitionScheme& s) {
  if (l >= s.up_threshold) return s.N + 2;  // ties at (yn)^a go up
  if (l < s.down_threshold) return 0;
  if (l < s.level0_upper) return 1;  // level 0
  for (int i = 1; i <= s.N; ++i)
    if (l < s.level_upper[static_cast<std::size_t>(i - 1)]) return 1 + i;
  return s.N + 1;  // numerically equal to the top threshold
}

}  // namespace

RangeClassification classify(const LocalTimeField& lt, const PartitionScheme& scheme) {
  RangeClassification rc;
  rc.num_levels = scheme.N;
  rc.class_count.assign(static_cast<std::size_t>(scheme.N) + 3, 0);
  rc.class_sum.assign(static_cast<std::size_t>(scheme.N) + 3, 0.0);
  rc.labels.reserve(lt.entries().size());
  for (const auto& e : lt.entries()) {
    int label = classify_count(static_cast<double>(e.count), scheme);
    rc.labels.push_back(label);
    ++rc.class_count[static_cast<std::size_t>(label)];
  }
  return rc;
}

RangeClassification classify(const RwrsSample& sample, const PartitionScheme& scheme) {
  RangeClassification rc = classify(sample.local_times, scheme);
  const auto& entries = sample.local_times.entries();
  if (entries.size() != sample.scenery_values.size())
    throw std::invalid_argument("classify: sample scenery misaligned");
  std::vector<Kahan> sums(rc.class_sum.size());
  Kahan total;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double term = static_cast<double>(entries[i].count) * sample.scenery_values[i];
    sums[static_cast<std::size_t>(rc.labels[i])].add(term);
    total.add(term);
  }
  for (std::size_t c = 0; c < sums.size(); ++c) rc.class_sum[c] = sums[c].value();
  rc.x_total = total.value();
  return rc;
}

DecompositionReport event_decomposition_check(const RwrsSample& sample,
                                              const PartitionScheme& scheme) {
  DecompositionReport rep;
  const double ny = static_cast<double>(scheme.n) * scheme.y;
  rep.applicable = sample.x_n > ny;
  if (!rep.applicable) return rep;

  RangeClassification rc = classify(sample, scheme);
  rep.down_fired =
      rc.class_sum[static_cast<std::size_t>(rc.down_index())] >
      static_cast<double>(scheme.n) * scheme.y_down;
  rep.up_fired = rc.class_count[static_cast<std::size_t>(rc.up_index())] > 0;
  for (int i = 0; i <= scheme.N; ++i) {
    if (rc.class_sum[static_cast<std::size_t>(rc.level_index(i))] >
        static_cast<double>(scheme.n) * scheme.y_list[static_cast<std::size_t>(i)])
      rep.levels_fired.push_back(i);
  }
  rep.ok = rep.down_fired || rep.up_fired || !rep.levels_fired.empty();
  return rep;
}

TailEstimate d_up_probability(const WalkConfig& cfg, const PartitionScheme& scheme,
                              std::int64_t replicas, std::uint64_t seed) {
  cfg.validate();
  if (cfg.dimension < 3)
    throw std::invalid_argument("d_up_probability requires d >= 3");
  const double threshold = scheme.up_threshold;
  const std::int64_t n = scheme.n;
  std::int64_t hits = parallel_reduce(
      replicas, 4096, std::int64_t{0},
      [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t h = 0;
        LocalTimeField lt(cfg.dimension, n + 1);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          lt.clear();
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          Site s;
          lt.add_visit(s);
          for (std::int64_t t = 0; t < n; ++t) {
            apply_step(cfg, rng, s);
            lt.add_visit(s);
            if (static_cast<double>(lt.max_count()) >= threshold) {
              ++h;
              break;
            }
          }
        }
        return h;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  return binomial_estimate(hits, replicas, EstimatorId::kNaive, seed);
}

DownChebyshevBound d_down_chebyshev(const LocalTimeField& lt,
                                    const SceneryDistribution& dist,
                                    const PartitionScheme& scheme,
                                    const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty())
    throw std::invalid_argument("d_down_chebyshev: empty lambda grid");
  DownChebyshevBound out;
  out.delta = *std::max_element(lambda_grid.begin(), lambda_grid.end());
  if (out.delta < 0.0)
    throw std::invalid_argument("d_down_chebyshev: lambda grid must be >= 0");
  out.nu_delta = moment_nu(dist, out.delta);

  double sup = 0.0;  // lambda = 0 is always admissible
  out.lambda_star = 0.0;
  for (double lam : lambda_grid) {
    if (lam < 0.0) throw std::invalid_argument("lambda grid must be >= 0");
    double v = scheme.y_down * lam - out.nu_delta * lam * lam / 2.0;
    if (v > sup) {
      sup = v;
      out.lambda_star = lam;
    }
  }
  const double nb = std::pow(static_cast<double>(scheme.n), scheme.b);
  out.log_bound = -(static_cast<double>(scheme.n) / nb / scheme.z_threshold) * sup;

  for (const auto& e : lt.entries())
    if (static_cast<double>(e.count) < scheme.down_threshold)
      out.down_l2 += static_cast<double>(e.count) * static_cast<double>(e.count);
  out.down_l2_envelope = scheme.z_threshold * static_cast<double>(scheme.n) * nb;
  return out;
}

}  // namespace rwrs
