#include "rwrs/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwrs/parallel.hpp"

namespace rwrs {

void WalkConfig::validate() const {
  if (dimension < 1 || dimension > kMaxDim)
    throw std::invalid_argument("walk dimension must be in [1, " +
                                std::to_string(kMaxDim) + "]");
}

// ---------------------------------------------------------------------------
// LocalTimeField

namespace {
std::size_t next_pow2(std::size_t v) {
  std::size_t p = 64;
  while (p < v) p <<= 1;
  return p;
}
}  // namespace

LocalTimeField::LocalTimeField(int dimension, std::int64_t expected_sites)
    : dimension_(dimension) {
  std::size_t slots = next_pow2(static_cast<std::size_t>(
      std::max<std::int64_t>(16, expected_sites) * 2));
  index_.assign(slots, -1);
  mask_ = slots - 1;
  entries_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(16, expected_sites)));
}

void LocalTimeField::rehash(std::size_t slots) {
  index_.assign(slots, -1);
  mask_ = slots - 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    std::size_t k = site_hash(entries_[i].site) & mask_;
    while (index_[k] >= 0) k = (k + 1) & mask_;
    index_[k] = static_cast<std::int32_t>(i);
  }
}

std::size_t LocalTimeField::find_slot(const Site& s) const {
  std::size_t k = site_hash(s) & mask_;
  while (index_[k] >= 0 && !(entries_[static_cast<std::size_t>(index_[k])].site == s))
    k = (k + 1) & mask_;
  return k;
}

void LocalTimeField::add_visit(const Site& s) {
  std::size_t k = find_slot(s);
  if (index_[k] < 0) {
    if ((entries_.size() + 1) * 10 > index_.size() * 7) {
      rehash(index_.size() * 2);
      k = find_slot(s);
    }
    index_[k] = static_cast<std::int32_t>(entries_.size());
    entries_.push_back(Entry{s, 1});
    sum_sq_ += 1;
    if (max_count_ < 1) max_count_ = 1;
  } else {
    Entry& e = entries_[static_cast<std::size_t>(index_[k])];
    sum_sq_ += 2 * e.count + 1;
    ++e.count;
    if (e.count > max_count_) max_count_ = e.count;
  }
  ++total_visits_;
}

std::int64_t LocalTimeField::count(const Site& s) const {
  std::size_t k = find_slot(s);
  return index_[k] < 0 ? 0 : entries_[static_cast<std::size_t>(index_[k])].count;
}

std::vector<std::int64_t> LocalTimeField::count_histogram() const {
  std::vector<std::int64_t> h(static_cast<std::size_t>(max_count_) + 1, 0);
  for (const Entry& e : entries_) ++h[static_cast<std::size_t>(e.count)];
  return h;
}

void LocalTimeField::clear() {
  entries_.clear();
  std::fill(index_.begin(), index_.end(), -1);
  total_visits_ = 0;
  sum_sq_ = 0;
  max_count_ = 0;
}

// ---------------------------------------------------------------------------
// Path generation and path statistics

Path simulate_path(const WalkConfig& cfg, std::int64_t n, std::uint64_t seed) {
  cfg.validate();
  if (n < 0) throw std::invalid_argument("step count must be >= 0");
  Path p;
  p.config = cfg;
  p.positions.reserve(static_cast<std::size_t>(n) + 1);
  Site s;
  p.positions.push_back(s);
  SplitMix64 rng = replica_stream(seed, 0);
  for (std::int64_t t = 0; t < n; ++t) {
    apply_step(cfg, rng, s);
    p.positions.push_back(s);
  }
  return p;
}

LocalTimeField local_times(const Path& path) {
  LocalTimeField lt(path.config.dimension,
                    static_cast<std::int64_t>(path.positions.size()));
  for (const Site& s : path.positions) lt.add_visit(s);
  return lt;
}

void accumulate_walk(const WalkConfig& cfg, std::int64_t n, SplitMix64& rng,
                     LocalTimeField& lt) {
  Site s;
  lt.add_visit(s);
  for (std::int64_t t = 0; t < n; ++t) {
    apply_step(cfg, rng, s);
    lt.add_visit(s);
  }
}

LocalTimeField simulate_local_times(const WalkConfig& cfg, std::int64_t n,
                                    std::uint64_t seed) {
  cfg.validate();
  LocalTimeField lt(cfg.dimension, n + 1);
  SplitMix64 rng = replica_stream(seed, 0);
  accumulate_walk(cfg, n, rng, lt);
  return lt;
}

std::int64_t max_displacement(const Path& path) {
  std::int64_t m = 0;
  for (const Site& s : path.positions) m = std::max(m, sup_norm(s));
  return m;
}

// ---------------------------------------------------------------------------
// Sojourn times

namespace {

// Open-addressed membership set for small regions.
class SiteSet {
 public:
  explicit SiteSet(const std::vector<Site>& sites) {
    std::size_t slots = next_pow2(sites.size() * 2 + 16);
    slots_.assign(slots, Site{});
    used_.assign(slots, false);
    mask_ = slots - 1;
    for (const Site& s : sites) {
      std::size_t k = site_hash(s) & mask_;
      while (used_[k] && !(slots_[k] == s)) k = (k + 1) & mask_;
      used_[k] = true;
      slots_[k] = s;
    }
  }

  bool contains(const Site& s) const {
    std::size_t k = site_hash(s) & mask_;
    while (used_[k]) {
      if (slots_[k] == s) return true;
      k = (k + 1) & mask_;
    }
    return false;
  }

 private:
  std::vector<Site> slots_;
  std::vector<bool> used_;
  std::size_t mask_ = 0;
};

std::int64_t region_diameter(const std::vector<Site>& region) {
  std::int64_t diam = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    std::int32_t lo = region[0].c[i], hi = region[0].c[i];
    for (const Site& s : region) {
      lo = std::min(lo, s.c[i]);
      hi = std::max(hi, s.c[i]);
    }
    diam = std::max<std::int64_t>(diam, static_cast<std::int64_t>(hi) - lo);
  }
  return diam;
}

}  // namespace

SojournResult sojourn_time(const WalkConfig& cfg, const std::vector<Site>& region,
                           std::int64_t horizon, std::int64_t escape_radius,
                           std::uint64_t seed) {
  cfg.validate();
  if (cfg.dimension <= 2)
    throw std::invalid_argument(
        "sojourn_time requires d >= 3: recurrent walks have infinite sojourn");
  if (region.empty()) return SojournResult{0, false};
  if (escape_radius <= 0) escape_radius = 64 * std::max<std::int64_t>(1, region_diameter(region));
  for (const Site& s : region)
    if (2 * sup_norm(s) > escape_radius)
      throw std::invalid_argument("region must lie inside ball(escape_radius/2)");

  SiteSet set(region);
  SojournResult r;
  Site s;
  SplitMix64 rng = replica_stream(seed, 0);
  if (set.contains(s)) ++r.count;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    apply_step(cfg, rng, s);
    if (set.contains(s)) ++r.count;
    if (sup_norm(s) > escape_radius) return r;
  }
  r.truncated = true;
  return r;
}

BoxSojournSample box_sojourn_samples(const WalkConfig& cfg, int side,
                                     std::int64_t replicas, std::int64_t horizon,
                                     std::int64_t escape_radius,
                                     std::uint64_t seed) {
  cfg.validate();
  if (cfg.dimension <= 2)
    throw std::invalid_argument("box sojourn requires d >= 3");
  if (side < 1) throw std::invalid_argument("box side must be >= 1");
  if (escape_radius <= 0) escape_radius = 64 * std::max(1, side - 1);
  const int d = cfg.dimension;

  struct Block {
    std::vector<std::int64_t> counts;
    std::int64_t truncated = 0;
  };
  Block total = parallel_reduce(
      replicas, 4096, Block{},
      [&](std::int64_t lo, std::int64_t hi) {
        Block b;
        b.counts.reserve(static_cast<std::size_t>(hi - lo));
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          Site s;
          std::int64_t cnt = 1;  // origin is a corner of the box
          bool truncated = true;
          for (std::int64_t t = 1; t <= horizon; ++t) {
            apply_step(cfg, rng, s);
            bool in = true;
            for (int i = 0; i < d; ++i)
              if (s.c[i] < 0 || s.c[i] >= side) {
                in = false;
                break;
              }
            if (in) ++cnt;
            if (sup_norm(s) > escape_radius) {
              truncated = false;
              break;
            }
          }
          b.counts.push_back(cnt);
          if (truncated) ++b.truncated;
        }
        return b;
      },
      [](Block a, Block b) {
        a.counts.insert(a.counts.end(), b.counts.begin(), b.counts.end());
        a.truncated += b.truncated;
        return a;
      });

  BoxSojournSample out;
  out.counts = std::move(total.counts);
  out.truncated_fraction =
      replicas > 0 ? static_cast<double>(total.truncated) / static_cast<double>(replicas) : 0.0;
  std::int64_t vol = 1;
  for (int i = 0; i < d; ++i) vol *= side;
  out.box_volume = vol;
  return out;
}

BoxSlopeFit fit_box_sojourn_slope(const BoxSojournSample& sample, int dimension,
                                  int min_points, std::int64_t min_hits) {
  const std::int64_t reps = static_cast<std::int64_t>(sample.counts.size());
  if (reps == 0) throw std::invalid_argument("empty sojourn sample");
  std::int64_t max_c = 0;
  for (std::int64_t c : sample.counts) max_c = std::max(max_c, c);
  // tail_hits[t] = #{count > t}
  std::vector<std::int64_t> exact(static_cast<std::size_t>(max_c) + 1, 0);
  for (std::int64_t c : sample.counts) ++exact[static_cast<std::size_t>(c)];
  std::vector<std::int64_t> tail(static_cast<std::size_t>(max_c) + 2, 0);
  for (std::int64_t t = max_c; t >= 0; --t)
    tail[static_cast<std::size_t>(t)] =
        tail[static_cast<std::size_t>(t) + 1] + exact[static_cast<std::size_t>(t)];

  // Fit over the exponential-tail region: from median depth down to the last
  // threshold that still keeps min_hits hits.
  std::int64_t t_lo = 0;
  while (t_lo <= max_c && tail[static_cast<std::size_t>(t_lo)] * 2 > reps) ++t_lo;
  std::int64_t t_hi = t_lo;
  while (t_hi + 1 <= max_c && tail[static_cast<std::size_t>(t_hi) + 1] >= min_hits)
    ++t_hi;
  if (t_hi - t_lo + 1 < min_points)
    throw std::runtime_error(
        "fit_box_sojourn_slope: not enough resolved thresholds; raise replicas");

  const double norm =
      std::pow(static_cast<double>(sample.box_volume),
               2.0 / static_cast<double>(dimension));
  BoxSlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  // Up to ~40 evenly spaced thresholds across the window.
  std::int64_t stride = std::max<std::int64_t>(1, (t_hi - t_lo) / 40);
  for (std::int64_t t = t_lo; t <= t_hi; t += stride) {
    double p = static_cast<double>(tail[static_cast<std::size_t>(t)]) /
               static_cast<double>(reps);
    double x = static_cast<double>(t) / norm;
    double v = -std::log(p);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
    ++m;
    fit.min_tail_hits = tail[static_cast<std::size_t>(t)];
    fit.u_hi = x;
    if (m == 1) fit.u_lo = x;
  }
  fit.points_used = m;
  double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw std::runtime_error("fit_box_sojourn_slope: degenerate fit");
  fit.slope = (m * sxy - sx * sy) / denom;
  return fit;
}

// ---------------------------------------------------------------------------
// Origin-return statistics

namespace {

inline bool at_origin(const Site& s) {
  std::uint64_t acc = 0;
  for (int i = 0; i < kMaxDim; ++i) acc |= static_cast<std::uint32_t>(s.c[i]);
  return acc == 0;
}

constexpr std::int32_t kDx3[8] = {1, -1, 0, 0, 0, 0, 0, 0};
constexpr std::int32_t kDy3[8] = {0, 0, 1, -1, 0, 0, 0, 0};
constexpr std::int32_t kDz3[8] = {0, 0, 0, 0, 1, -1, 0, 0};

// First return time to the origin, or -1 if none by the horizon.
inline std::int64_t first_return_time(const WalkConfig& cfg, SplitMix64& rng,
                                      std::int64_t horizon) {
  if (cfg.dimension == 3 && cfg.law == IncrementLaw::kSimple) {
    std::int32_t x = 0, y = 0, z = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      std::uint64_t r = uniform_below(rng, 6);
      x += kDx3[r];
      y += kDy3[r];
      z += kDz3[r];
      if ((x | y | z) == 0) return t;
    }
    return -1;
  }
  Site s;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    apply_step(cfg, rng, s);
    if (at_origin(s)) return t;
  }
  return -1;
}

}  // namespace

TailEstimate estimate_return_prob(const WalkConfig& cfg, std::int64_t replicas,
                                  std::int64_t horizon, std::uint64_t seed) {
  cfg.validate();
  std::int64_t hits = parallel_reduce(
      replicas, 8192, std::int64_t{0},
      [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t h = 0;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          if (first_return_time(cfg, rng, horizon) >= 0) ++h;
        }
        return h;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  return binomial_estimate(hits, replicas, EstimatorId::kNaive, seed);
}

ReturnTimeCdf estimate_return_cdf(const WalkConfig& cfg, std::int64_t replicas,
                                  std::int64_t horizon, std::uint64_t seed) {
  cfg.validate();
  using Times = std::vector<std::int32_t>;
  Times times = parallel_reduce(
      replicas, 8192, Times{},
      [&](std::int64_t lo, std::int64_t hi) {
        Times t;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          std::int64_t h0 = first_return_time(cfg, rng, horizon);
          if (h0 >= 0) t.push_back(static_cast<std::int32_t>(h0));
        }
        return t;
      },
      [](Times a, Times b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
      });

  ReturnTimeCdf cdf;
  cdf.replicas = replicas;
  cdf.horizon = horizon;
  cdf.seed = seed;
  cdf.returned_by.assign(static_cast<std::size_t>(horizon) + 1, 0);
  for (std::int32_t t : times) ++cdf.returned_by[static_cast<std::size_t>(t)];
  std::int64_t acc = 0;
  for (auto& v : cdf.returned_by) {
    acc += v;
    v = acc;
  }
  return cdf;
}

double ReturnTimeCdf::prob_return_le(std::int64_t m) const {
  if (replicas <= 0 || m < 0) return 0.0;
  m = std::min<std::int64_t>(m, horizon);
  return static_cast<double>(returned_by[static_cast<std::size_t>(m)]) /
         static_cast<double>(replicas);
}

double ReturnTimeCdf::kappa0() const { return -std::log(p_ret()); }

std::vector<TailEstimate> local_time_tail_curve(const WalkConfig& cfg, int k_max,
                                                std::int64_t replicas,
                                                std::int64_t horizon,
                                                std::uint64_t seed) {
  cfg.validate();
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  using Hits = std::vector<std::int64_t>;
  Hits hits = parallel_reduce(
      replicas, 8192, Hits(static_cast<std::size_t>(k_max) + 1, 0),
      [&](std::int64_t lo, std::int64_t hi) {
        Hits h(static_cast<std::size_t>(k_max) + 1, 0);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          // Count visits to the origin (the time-0 visit included) up to the
          // horizon, stopping once k_max is reached.
          int visits = 1;
          std::int64_t remaining = horizon;
          while (visits < k_max) {
            std::int64_t h0 = first_return_time(cfg, rng, remaining);
            if (h0 < 0) break;
            ++visits;
            remaining -= h0;
          }
          ++h[static_cast<std::size_t>(visits)];
        }
        return h;
      },
      [](Hits a, const Hits& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return a;
      });

  // hits[v] = replicas with exactly v visits (v = k_max means ">= k_max").
  std::vector<TailEstimate> out;
  std::int64_t ge = 0;
  std::vector<std::int64_t> ge_k(static_cast<std::size_t>(k_max) + 1, 0);
  for (int k = k_max; k >= 1; --k) {
    ge += hits[static_cast<std::size_t>(k)];
    ge_k[static_cast<std::size_t>(k)] = ge;
  }
  for (int k = 1; k <= k_max; ++k)
    out.push_back(binomial_estimate(ge_k[static_cast<std::size_t>(k)], replicas,
                                    EstimatorId::kNaive, seed));
  return out;
}

TailEstimate local_time_tail(const WalkConfig& cfg, int k, std::int64_t replicas,
                             std::int64_t horizon, std::uint64_t seed) {
  return local_time_tail_curve(cfg, k, replicas, horizon, seed).back();
}

MeanEstimate green_function(const WalkConfig& cfg, const Site& target,
                            std::int64_t replicas, std::int64_t horizon,
                            std::uint64_t seed) {
  cfg.validate();
  if (cfg.dimension <= 2)
    throw std::invalid_argument("green_function requires d >= 3");
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t late = 0;
  };
  const std::int64_t late_mark = horizon - horizon / 2;
  Acc acc = parallel_reduce(
      replicas, 4096, Acc{},
      [&](std::int64_t lo, std::int64_t hi) {
        Acc a;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          SplitMix64 rng = replica_stream(seed, static_cast<std::uint64_t>(rep));
          Site s;
          std::int64_t cnt = (s == target) ? 1 : 0;
          bool late_visit = false;
          for (std::int64_t t = 1; t <= horizon; ++t) {
            apply_step(cfg, rng, s);
            if (s == target) {
              ++cnt;
              if (t >= late_mark) late_visit = true;
            }
          }
          double c = static_cast<double>(cnt);
          a.sum += c;
          a.sum_sq += c * c;
          if (late_visit) ++a.late;
        }
        return a;
      },
      [](Acc a, const Acc& b) {
        a.sum += b.sum;
        a.sum_sq += b.sum_sq;
        a.late += b.late;
        return a;
      });

  MeanEstimate m;
  m.replicas = replicas;
  m.seed = seed;
  if (replicas > 0) {
    double n = static_cast<double>(replicas);
    m.mean = acc.sum / n;
    double var = acc.sum_sq / n - m.mean * m.mean;
    m.se = std::sqrt(std::max(0.0, var) / n);
    m.truncated_fraction = static_cast<double>(acc.late) / n;
  }
  return m;
}

}  // namespace rwrs
