#include "rwrs/bellshape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwrs/parallel.hpp"

namespace rwrs {

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  s -= 0.5 * (values.front() + values.back());
  return s * spacing();
}

double GridDensity::value_at(double t) const {
  if (t < -half_width || t > half_width) return 0.0;
  double u = (t + half_width) / spacing();
  int j = static_cast<int>(u);
  if (j >= bins) return values.back();
  double frac = u - j;
  return values[static_cast<std::size_t>(j)] * (1.0 - frac) +
         values[static_cast<std::size_t>(j) + 1] * frac;
}

double GridDensity::tail_above(double y) const {
  if (y >= half_width) return 0.0;
  const double h = spacing();
  if (y < -half_width) y = -half_width;
  double u = (y + half_width) / h;
  int j = static_cast<int>(u);
  double frac = u - j;
  // Partial cell from y to node j+1, then full trapezoids.
  double fy = value_at(y);
  double s = 0.0;
  if (j < bins) {
    double right = values[static_cast<std::size_t>(j) + 1];
    s += 0.5 * (fy + right) * (1.0 - frac) * h;
    for (int k = j + 1; k < bins; ++k)
      s += 0.5 *
           (values[static_cast<std::size_t>(k)] +
            values[static_cast<std::size_t>(k) + 1]) *
           h;
  }
  return s;
}

GridDensity render_grid(const std::function<double(double)>& fn, double half_width,
                        int bins) {
  if (bins < 2 || bins % 2 != 0)
    throw std::invalid_argument("grid bins must be even and >= 2");
  if (!(half_width > 0.0)) throw std::invalid_argument("half_width must be > 0");
  GridDensity gd;
  gd.half_width = half_width;
  gd.bins = bins;
  gd.values.resize(static_cast<std::size_t>(bins) + 1);
  for (int j = 0; j <= bins; ++j)
    gd.values[static_cast<std::size_t>(j)] = fn(gd.node(j));
  return gd;
}

double tail_cutoff(const SceneryDistribution& dist, double tail_mass) {
  double t = 1.0;
  while (log_tail(dist, t) > std::log(tail_mass)) t *= 2.0;
  return t;
}

GridDensity render_density(const SceneryDistribution& dist, double half_width,
                           int bins) {
  if (half_width <= 0.0) half_width = tail_cutoff(dist, 1e-9);
  return render_grid([&](double t) { return dist.density(t); }, half_width, bins);
}

BellShapeReport is_bell_shaped(const GridDensity& gd, double tol) {
  BellShapeReport rep;
  const int m = gd.bins;
  for (int j = 0; j <= m / 2; ++j) {
    double diff = std::abs(gd.values[static_cast<std::size_t>(j)] -
                           gd.values[static_cast<std::size_t>(m - j)]);
    if (diff > tol) {
      rep.ok = rep.even = false;
      rep.violation_index = j;
      rep.violation = diff;
      return rep;
    }
  }
  for (int j = m / 2; j < m; ++j) {
    double rise = gd.values[static_cast<std::size_t>(j) + 1] -
                  gd.values[static_cast<std::size_t>(j)];
    if (rise > tol) {
      rep.ok = rep.monotone = false;
      rep.violation_index = j;
      rep.violation = rise;
      return rep;
    }
  }
  return rep;
}

GridDensity convolve(const GridDensity& f, const GridDensity& g) {
  const double h = f.spacing();
  if (std::abs(h - g.spacing()) > 1e-12 * h)
    throw std::invalid_argument("convolve: grid spacings must match");
  GridDensity out;
  out.half_width = f.half_width + g.half_width;
  out.bins = f.bins + g.bins;
  out.values.assign(static_cast<std::size_t>(out.bins) + 1, 0.0);
  const int mf = f.bins, mg = g.bins;
  for (int k = 0; k <= mf + mg; ++k) {
    int j_lo = std::max(0, k - mg);
    int j_hi = std::min(mf, k);
    double s = 0.0;
    for (int j = j_lo; j <= j_hi; ++j)
      s += f.values[static_cast<std::size_t>(j)] *
           g.values[static_cast<std::size_t>(k - j)];
    out.values[static_cast<std::size_t>(k)] = s * h;
  }
  return out;
}

TailEstimate weighted_tail_mc(const std::vector<double>& coeffs,
                              const SceneryDistribution& dist, double y,
                              std::int64_t replicas, std::uint64_t seed) {
  if (coeffs.empty()) throw std::invalid_argument("weighted_tail: empty coefficients");
  if (!(y > 0.0)) throw std::invalid_argument("weighted_tail requires y > 0");
  std::int64_t hits = parallel_reduce(
      replicas, 16384, std::int64_t{0},
      [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t h = 0;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          double s = 0.0;
          for (double c : coeffs) s += c * sample_one(dist, rng);
          if (s > y) ++h;
        }
        return h;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  return binomial_estimate(hits, replicas, EstimatorId::kNaive, seed);
}

double weighted_tail_grid(const std::vector<double>& coeffs,
                          const SceneryDistribution& dist, double y,
                          int bins_per_component) {
  if (coeffs.empty()) throw std::invalid_argument("weighted_tail: empty coefficients");
  if (coeffs.size() > 32)
    throw std::invalid_argument("weighted_tail grid method rejects > 32 coefficients");
  for (double c : coeffs)
    if (!(c > 0.0))
      throw std::invalid_argument("weighted_tail grid method needs positive coefficients");

  const double t_cut = tail_cutoff(dist, 1e-10);
  const double w_max = t_cut * *std::max_element(coeffs.begin(), coeffs.end());
  const double h = 2.0 * w_max / bins_per_component;

  GridDensity acc;
  bool first = true;
  for (double c : coeffs) {
    // Density of c * eta on a node-aligned width.
    double w = c * t_cut;
    int half_bins = std::max(1, static_cast<int>(std::ceil(w / h)));
    double w_aligned = half_bins * h;
    GridDensity comp = render_grid(
        [&](double t) { return dist.density(t / c) / c; }, w_aligned,
        2 * half_bins);
    acc = first ? comp : convolve(acc, comp);
    first = false;
  }
  return acc.tail_above(y);
}

double weighted_tail(const std::vector<double>& coeffs,
                     const SceneryDistribution& dist, double y, TailMethod method,
                     std::int64_t replicas, std::uint64_t seed) {
  if (method == TailMethod::kMonteCarlo)
    return weighted_tail_mc(coeffs, dist, y, replicas, seed).p();
  return weighted_tail_grid(coeffs, dist, y);
}

double symmetric_sum_identity_check(const GridDensity& f, const GridDensity& g,
                                    double y) {
  if (!(y > 0.0)) throw std::invalid_argument("identity check requires y > 0");
  const double lhs = convolve(f, g).tail_above(y);
  const double p_xi = f.tail_above(y);

  // Trapezoid in z over g's positive support.
  const double h = g.spacing();
  const int half = g.bins / 2;
  double integral = 0.0;
  double prev = 0.0;
  for (int k = 0; k <= half; ++k) {
    double z = k * h;
    double tail_eta = g.tail_above(z);
    double kernel = f.value_at(std::abs(y - z)) - f.value_at(y + z);
    double term = tail_eta * kernel;
    if (k > 0) integral += 0.5 * (prev + term) * h;
    prev = term;
  }
  return std::abs(lhs - (p_xi + integral));
}

}  // namespace rwrs
