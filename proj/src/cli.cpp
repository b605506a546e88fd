#include "rwrs/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwrs/bellshape.hpp"
#include "rwrs/partition.hpp"
#include "rwrs/rwrs_process.hpp"
#include "rwrs/tail_estimator.hpp"

namespace rwrs {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

/// One header-described table, CSV or JSON-lines, written to a path or stdout.
class TableWriter {
 public:
  TableWriter(const std::string& path, const std::string& format)
      : format_(format) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output path: " + path);
      out_ = &file_;
    } else {
      out_ = &std::cout;
    }
  }

  void header(std::vector<std::string> cols) {
    cols_ = std::move(cols);
    if (format_ == "csv") {
      for (std::size_t i = 0; i < cols_.size(); ++i)
        *out_ << (i ? "," : "") << cols_[i];
      *out_ << '\n';
    }
  }

  void row(const std::vector<std::string>& vals) {
    if (format_ == "csv") {
      for (std::size_t i = 0; i < vals.size(); ++i)
        *out_ << (i ? "," : "") << vals[i];
      *out_ << '\n';
    } else {
      *out_ << '{';
      for (std::size_t i = 0; i < vals.size(); ++i) {
        *out_ << (i ? "," : "") << '"' << cols_[i] << "\":";
        bool numeric = !vals[i].empty() &&
                       vals[i].find_first_not_of("0123456789+-.eEinfa") ==
                           std::string::npos &&
                       vals[i] != "inf" && vals[i] != "-inf" && vals[i] != "nan";
        if (numeric)
          *out_ << vals[i];
        else
          *out_ << '"' << vals[i] << '"';
      }
      *out_ << "}\n";
    }
  }

  void raw(const std::string& text) { *out_ << text; }

  bool to_stdout() const { return out_ == &std::cout; }

 private:
  std::string format_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
  std::vector<std::string> cols_;
};

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (required for reproducibility)")
      ->required();
  cmd->add_option("--out", c.out_path, "output path (default stdout)");
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json-lines"}))
      ->default_val("csv");
}

void summary(const TableWriter& w, const std::string& line) {
  (w.to_stdout() ? std::cerr : std::cout) << line << '\n';
}

IncrementLaw parse_law(const std::string& s) {
  if (s == "simple") return IncrementLaw::kSimple;
  if (s == "lazy-simple") return IncrementLaw::kLazySimple;
  throw CLI::ValidationError("--law", "unknown increment law: " + s);
}

// ---------------------------------------------------------------------------

int cmd_simulate(int d, const std::string& law, std::int64_t n,
                 const CommonOpts& c) {
  WalkConfig cfg{d, parse_law(law)};
  Path p = simulate_path(cfg, n, c.seed);
  LocalTimeField lt = local_times(p);
  TableWriter w(c.out_path, c.format);
  w.header({"d", "law", "n", "seed", "range", "max_local_time",
            "self_intersections", "max_displacement"});
  w.row({fmt(d), law, fmt(n), fmt(c.seed), fmt(lt.support_size()),
         fmt(lt.max_count()), fmt(lt.self_intersections()),
         fmt(max_displacement(p))});
  summary(w, "simulate: n=" + std::to_string(n) +
                 " range=" + std::to_string(lt.support_size()) +
                 " max_l=" + std::to_string(lt.max_count()));
  return 0;
}

int cmd_moments(int d, const std::string& law, double alpha, double c_alpha,
                const std::vector<std::int64_t>& ns, std::int64_t replicas,
                const CommonOpts& c) {
  WalkConfig cfg{d, parse_law(law)};
  SceneryDistribution dist(alpha, c_alpha);
  TableWriter w(c.out_path, c.format);
  w.header({"d", "alpha", "n", "replicas", "seed", "mean_x2", "se_x2",
            "decoupled", "mean_diff", "se_diff", "scaled_ratio"});
  for (std::int64_t n : ns) {
    SecondMomentEstimate e = second_moment(cfg, dist, n, replicas, c.seed);
    double scale = d == 1   ? std::pow(static_cast<double>(n), 1.5)
                   : d == 2 ? static_cast<double>(n) * std::log(static_cast<double>(n))
                            : static_cast<double>(n);
    w.row({fmt(d), fmt(alpha), fmt(n), fmt(replicas), fmt(c.seed), fmt(e.mean_x2),
           fmt(e.se_x2), fmt(e.decoupled), fmt(e.mean_diff), fmt(e.se_diff),
           fmt(e.mean_x2 / scale)});
  }
  summary(w, "moments: " + std::to_string(ns.size()) + " n-values done");
  return 0;
}

int cmd_tail(int d, const std::string& law, double alpha, double c_alpha,
             std::int64_t n, double y, const std::string& estimator,
             std::int64_t replicas, std::int64_t inner, int spike_max,
             std::int64_t cdf_replicas, std::int64_t cdf_horizon,
             const CommonOpts& c) {
  WalkConfig cfg{d, parse_law(law)};
  SceneryDistribution dist(alpha, c_alpha);
  TableWriter w(c.out_path, c.format);
  w.header({"estimator", "d", "alpha", "n", "y", "log_p", "p", "se_log",
            "replicas", "seed"});
  TailEstimate e;
  if (estimator == "naive") {
    e = naive_tail(cfg, dist, n, y, replicas, c.seed);
  } else if (estimator == "tilted") {
    TiltedOptions opt;
    opt.spike_max = spike_max;
    e = tilted_tail(cfg, dist, n, y, replicas, inner, c.seed, opt);
  } else if (estimator == "lower-bound") {
    LowerBoundResult lb =
        lower_bound(cfg, dist, n, y, 0, cdf_replicas, cdf_horizon, c.seed);
    e.log_p = lb.log_bound;
    e.se_log = 0.0;
    e.replicas = cdf_replicas;
    e.id = EstimatorId::kLowerBound;
    e.seed = c.seed;
  } else {
    throw CLI::ValidationError("--estimator", "unknown estimator: " + estimator);
  }
  w.row({to_string(e.id), fmt(d), fmt(alpha), fmt(n), fmt(y), fmt(e.log_p),
         fmt(e.p()), fmt(e.se_log), fmt(e.replicas), fmt(e.seed)});
  summary(w, std::string("tail: log_p=") + fmt(e.log_p) + " (" + to_string(e.id) +
                 ")");
  return 0;
}

int cmd_exponent(int d, const std::string& law, double alpha, double c_alpha,
                 const std::vector<std::int64_t>& ns, double y,
                 std::int64_t outer, std::int64_t inner, bool no_spike,
                 std::int64_t cdf_replicas, std::int64_t cdf_horizon,
                 const CommonOpts& c) {
  ExponentPipelineConfig pc;
  pc.walk = WalkConfig{d, parse_law(law)};
  pc.dist = SceneryDistribution(alpha, c_alpha);
  pc.n_values = ns;
  pc.y = y;
  pc.outer_replicas = outer;
  pc.inner_replicas = inner;
  pc.seed = c.seed;
  pc.spike = !no_spike;
  pc.cdf_replicas = cdf_replicas;
  pc.cdf_horizon = cdf_horizon;
  ExponentPipelineResult r = run_exponent_pipeline(pc);

  TableWriter w(c.out_path, c.format);
  w.header({"estimator", "n", "ny", "log_p", "se_log", "log_neg_log_p",
            "lower_bound", "lb_k", "replicas", "seed", "fitted_slope"});
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const TailEstimate& e = r.estimates[i];
    w.row({to_string(e.id), fmt(ns[i]), fmt(static_cast<double>(ns[i]) * y),
           fmt(e.log_p), fmt(e.se_log), fmt(std::log(-e.log_p)),
           fmt(r.bounds[i].log_bound), fmt(r.bounds[i].k), fmt(e.replicas),
           fmt(e.seed), fmt(r.fit.slope)});
  }
  summary(w, "exponent: slope=" + fmt(r.fit.slope) + " intercept=" +
                 fmt(r.fit.intercept) + " p_ret=" + fmt(r.p_ret));
  return 0;
}

int cmd_localization(int d, const std::string& law,
                     const std::vector<int>& sides, std::int64_t replicas,
                     std::int64_t horizon, std::int64_t radius,
                     const CommonOpts& c) {
  WalkConfig cfg{d, parse_law(law)};
  TableWriter w(c.out_path, c.format);
  w.header({"side", "volume", "slope", "points", "min_tail_hits",
            "truncated_fraction", "replicas", "seed"});
  double s_min = 0, s_max = 0;
  bool first = true;
  for (int side : sides) {
    BoxSojournSample s =
        box_sojourn_samples(cfg, side, replicas, horizon, radius, c.seed);
    BoxSlopeFit fit = fit_box_sojourn_slope(s, d);
    w.row({fmt(side), fmt(s.box_volume), fmt(fit.slope), fmt(fit.points_used),
           fmt(fit.min_tail_hits), fmt(s.truncated_fraction), fmt(replicas),
           fmt(c.seed)});
    s_min = first ? fit.slope : std::min(s_min, fit.slope);
    s_max = first ? fit.slope : std::max(s_max, fit.slope);
    first = false;
  }
  summary(w, "localization: slope ratio=" + fmt(s_max / s_min));
  return 0;
}

int cmd_partition(double alpha, int d, std::int64_t n, double y, double z,
                  double chi_lo, double chi_hi, std::int64_t check_replicas,
                  const CommonOpts& c) {
  PartitionScheme scheme = build_scheme(alpha, d, n, y, z, {chi_lo, chi_hi});
  TableWriter w(c.out_path, c.format);
  std::ostringstream block;
  scheme.serialize(block);
  w.raw(block.str());

  if (check_replicas > 0) {
    WalkConfig cfg{d, IncrementLaw::kSimple};
    SceneryDistribution dist(alpha, 1.0);
    std::int64_t violations = 0, applicable = 0;
    for (std::int64_t rep = 0; rep < check_replicas; ++rep) {
      RwrsSample sample = sample_rwrs(cfg, dist, n, mix64(c.seed ^ (0x51ed + rep)));
      DecompositionReport rep_out = event_decomposition_check(sample, scheme);
      if (rep_out.applicable) ++applicable;
      if (!rep_out.ok) ++violations;
    }
    w.raw("decomposition_checked " + std::to_string(check_replicas) + "\n");
    w.raw("decomposition_applicable " + std::to_string(applicable) + "\n");
    w.raw("decomposition_violations " + std::to_string(violations) + "\n");
    summary(w, "partition: N=" + std::to_string(scheme.N) +
                   " violations=" + std::to_string(violations));
    return violations == 0 ? 0 : 1;
  }
  summary(w, "partition: N=" + std::to_string(scheme.N) + " chi=" + fmt(scheme.chi));
  return 0;
}

int cmd_bellshape(double alpha, double c_alpha, int pairs, int bins,
                  const CommonOpts& c) {
  TableWriter w(c.out_path, c.format);
  w.header({"check", "case", "value", "pass", "seed"});
  SplitMix64 rng = replica_stream(c.seed, 0);
  int fails = 0;

  for (int i = 0; i < pairs; ++i) {
    SceneryDistribution f(1.0 + 2.0 * uniform01(rng), 0.5 + 1.5 * uniform01(rng));
    SceneryDistribution g(1.0 + 2.0 * uniform01(rng), 0.5 + 1.5 * uniform01(rng));
    double wf = tail_cutoff(f, 1e-9), wg = tail_cutoff(g, 1e-9);
    double wmax = std::max(wf, wg);
    GridDensity gf = render_density(f, wmax, bins);
    GridDensity gg = render_density(g, wmax, bins);
    BellShapeReport rep = is_bell_shaped(convolve(gf, gg), 1e-9);
    if (!rep.ok) ++fails;
    w.row({"convolution-closure", fmt(i), fmt(rep.violation),
           rep.ok ? "1" : "0", fmt(c.seed)});
  }

  SceneryDistribution base(alpha, c_alpha);
  for (double y : {0.5, 1.0, 2.0}) {
    GridDensity gd = render_density(base, 0.0, bins);
    double res = symmetric_sum_identity_check(gd, gd, y);
    bool ok = res < 1e-5;
    if (!ok) ++fails;
    w.row({"symmetric-sum-identity", fmt(y), fmt(res), ok ? "1" : "0",
           fmt(c.seed)});
  }
  summary(w, "bellshape-verify: failures=" + std::to_string(fails));
  return fails == 0 ? 0 : 1;
}

int cmd_lower_bound(int d, const std::string& law, double alpha, double c_alpha,
                    std::int64_t n, double y, std::int64_t k, bool scan,
                    std::int64_t cdf_replicas, std::int64_t cdf_horizon,
                    const CommonOpts& c) {
  WalkConfig cfg{d, parse_law(law)};
  SceneryDistribution dist(alpha, c_alpha);
  ReturnTimeCdf cdf = estimate_return_cdf(cfg, cdf_replicas, cdf_horizon, c.seed);
  TableWriter w(c.out_path, c.format);
  w.header({"estimator", "n", "y", "k", "log_bound", "log_walk_part",
            "log_scenery_part", "replicas", "seed"});
  if (scan) {
    double ny = static_cast<double>(n) * y;
    std::int64_t k_max =
        static_cast<std::int64_t>(std::ceil(3.0 * std::pow(ny, dist.a())));
    auto rows = scan_lower_bound(cdf, dist, n, y, k_max);
    std::int64_t best_k = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      w.row({"lower-bound", fmt(n), fmt(y), fmt(r.k), fmt(r.log_bound),
             fmt(r.log_walk_part), fmt(r.log_scenery_part), fmt(cdf_replicas),
             fmt(c.seed)});
      if (r.log_bound > best) {
        best = r.log_bound;
        best_k = r.k;
      }
    }
    summary(w, "lower-bound scan: argmax k=" + std::to_string(best_k) +
                   " (ny)^a=" + fmt(std::pow(ny, dist.a())));
    return 0;
  }
  LowerBoundResult r = lower_bound(cdf, dist, n, y, k);
  w.row({"lower-bound", fmt(n), fmt(y), fmt(r.k), fmt(r.log_bound),
         fmt(r.log_walk_part), fmt(r.log_scenery_part), fmt(cdf_replicas),
         fmt(c.seed)});
  summary(w, "lower-bound: log_bound=" + fmt(r.log_bound));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Random walk in random scenery: simulation and rare-event estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key-value config file supplying defaults");
  app.allow_config_extras(false);

  // simulate
  auto* sim = app.add_subcommand("simulate", "one path: range and local-time summary");
  int sim_d = 1;
  std::string sim_law = "simple";
  std::int64_t sim_n = 0;
  CommonOpts sim_c;
  sim->add_option("--d", sim_d, "lattice dimension")->check(CLI::Range(1, 8));
  sim->add_option("--law", sim_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  sim->add_option("--n", sim_n, "steps")->required()->check(CLI::NonNegativeNumber);
  add_common(sim, sim_c);

  // moments
  auto* mom = app.add_subcommand("moments", "E[X_n^2] scaling table");
  int mom_d = 1;
  std::string mom_law = "simple";
  double mom_alpha = 2.0, mom_c = 1.0;
  std::vector<std::int64_t> mom_ns;
  std::int64_t mom_reps = 10000;
  CommonOpts mom_co;
  mom->add_option("--d", mom_d)->check(CLI::Range(1, 8));
  mom->add_option("--law", mom_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  mom->add_option("--alpha", mom_alpha)->check(CLI::Range(1.0, 64.0));
  mom->add_option("--c", mom_c)->check(CLI::PositiveNumber);
  mom->add_option("--n", mom_ns, "comma-separated n list")->required()->delimiter(',');
  mom->add_option("--replicas", mom_reps)->check(CLI::PositiveNumber);
  add_common(mom, mom_co);

  // tail
  auto* tail = app.add_subcommand("tail", "P(X_n >= ny) by one estimator");
  int tail_d = 3;
  std::string tail_law = "simple", tail_est = "naive";
  double tail_alpha = 1.0, tail_c = 1.0, tail_y = 1.0;
  std::int64_t tail_n = 0, tail_reps = 10000, tail_inner = 8;
  int tail_spike = 0;
  std::int64_t tail_cdf_reps = 200000, tail_cdf_hor = 100000;
  CommonOpts tail_co;
  tail->add_option("--d", tail_d)->check(CLI::Range(1, 8));
  tail->add_option("--law", tail_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  tail->add_option("--alpha", tail_alpha)->check(CLI::Range(1.0, 64.0));
  tail->add_option("--c", tail_c)->check(CLI::PositiveNumber);
  tail->add_option("--n", tail_n)->required()->check(CLI::PositiveNumber);
  tail->add_option("--y", tail_y)->check(CLI::PositiveNumber);
  tail->add_option("--estimator", tail_est)
      ->check(CLI::IsMember({"naive", "tilted", "lower-bound"}));
  tail->add_option("--replicas", tail_reps, "replicas (outer replicas for tilted)");
  tail->add_option("--inner", tail_inner, "inner replicas for tilted");
  tail->add_option("--spike", tail_spike, "spike proposal support (tilted; 0 off)");
  tail->add_option("--cdf-replicas", tail_cdf_reps);
  tail->add_option("--cdf-horizon", tail_cdf_hor);
  add_common(tail, tail_co);

  // exponent
  auto* expo = app.add_subcommand("exponent", "slope of log(-log P) vs log(ny)");
  int exp_d = 3;
  std::string exp_law = "simple";
  double exp_alpha = 1.0, exp_c = 1.0, exp_y = 1.0;
  std::vector<std::int64_t> exp_ns;
  std::int64_t exp_outer = 100000, exp_inner = 8;
  bool exp_no_spike = false;
  std::int64_t exp_cdf_reps = 400000, exp_cdf_hor = 200000;
  CommonOpts exp_co;
  expo->add_option("--d", exp_d)->check(CLI::Range(3, 8));
  expo->add_option("--law", exp_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  expo->add_option("--alpha", exp_alpha)->check(CLI::Range(1.0, 64.0));
  expo->add_option("--c", exp_c)->check(CLI::PositiveNumber);
  expo->add_option("--y", exp_y)->check(CLI::PositiveNumber);
  expo->add_option("--n", exp_ns, "comma-separated n list (>= 3 values)")
      ->required()
      ->delimiter(',');
  expo->add_option("--replicas", exp_outer, "outer replicas per n");
  expo->add_option("--inner", exp_inner);
  expo->add_flag("--no-spike", exp_no_spike, "disable the spiked walk proposal");
  expo->add_option("--cdf-replicas", exp_cdf_reps);
  expo->add_option("--cdf-horizon", exp_cdf_hor);
  add_common(expo, exp_co);

  // localization
  auto* loc = app.add_subcommand("localization", "box sojourn tail slopes");
  int loc_d = 3;
  std::string loc_law = "simple";
  std::vector<int> loc_sides{1, 2, 4, 8};
  std::int64_t loc_reps = 100000, loc_hor = 50000, loc_rad = 64;
  CommonOpts loc_co;
  loc->add_option("--d", loc_d)->check(CLI::Range(3, 8));
  loc->add_option("--law", loc_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  loc->add_option("--sides", loc_sides)->delimiter(',');
  loc->add_option("--replicas", loc_reps);
  loc->add_option("--horizon", loc_hor);
  loc->add_option("--radius", loc_rad);
  add_common(loc, loc_co);

  // partition
  auto* part = app.add_subcommand("partition", "build and audit the range partition");
  double part_alpha = 2.0, part_y = 1.0, part_z = 0.1;
  double part_chi_lo = 0.5, part_chi_hi = 4.0;
  int part_d = 5;
  std::int64_t part_n = 0, part_check = 0;
  CommonOpts part_co;
  part->add_option("--alpha", part_alpha)->required();
  part->add_option("--d", part_d)->required()->check(CLI::Range(3, 8));
  part->add_option("--n", part_n)->required()->check(CLI::PositiveNumber);
  part->add_option("--y", part_y)->check(CLI::PositiveNumber);
  part->add_option("--z", part_z, "z threshold")->check(CLI::PositiveNumber);
  part->add_option("--chi-lo", part_chi_lo);
  part->add_option("--chi-hi", part_chi_hi);
  part->add_option("--check-replicas", part_check,
                   "run the event decomposition check on this many samples");
  add_common(part, part_co);

  // bellshape-verify
  auto* bell = app.add_subcommand("bellshape-verify", "appendix density checks");
  double bell_alpha = 1.5, bell_c = 1.0;
  int bell_pairs = 50, bell_bins = 4096;
  CommonOpts bell_co;
  bell->add_option("--alpha", bell_alpha)->check(CLI::Range(1.0, 64.0));
  bell->add_option("--c", bell_c)->check(CLI::PositiveNumber);
  bell->add_option("--pairs", bell_pairs);
  bell->add_option("--bins", bell_bins);
  add_common(bell, bell_co);

  // lower-bound
  auto* lb = app.add_subcommand("lower-bound", "single-site analytic lower bound");
  int lb_d = 3;
  std::string lb_law = "simple";
  double lb_alpha = 1.0, lb_c = 1.0, lb_y = 1.0;
  std::int64_t lb_n = 0, lb_k = 0;
  bool lb_scan = false;
  std::int64_t lb_cdf_reps = 200000, lb_cdf_hor = 100000;
  CommonOpts lb_co;
  lb->add_option("--d", lb_d)->check(CLI::Range(3, 8));
  lb->add_option("--law", lb_law)->check(CLI::IsMember({"simple", "lazy-simple"}));
  lb->add_option("--alpha", lb_alpha)->check(CLI::Range(1.0, 64.0));
  lb->add_option("--c", lb_c)->check(CLI::PositiveNumber);
  lb->add_option("--n", lb_n)->required()->check(CLI::PositiveNumber);
  lb->add_option("--y", lb_y)->check(CLI::PositiveNumber);
  lb->add_option("--k", lb_k, "pile-up height (default floor((ny)^a))");
  lb->add_flag("--scan", lb_scan, "scan k in [1, 3 (ny)^a]");
  lb->add_option("--cdf-replicas", lb_cdf_reps);
  lb->add_option("--cdf-horizon", lb_cdf_hor);
  add_common(lb, lb_co);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_d, sim_law, sim_n, sim_c);
    if (*mom)
      return cmd_moments(mom_d, mom_law, mom_alpha, mom_c, mom_ns, mom_reps, mom_co);
    if (*tail)
      return cmd_tail(tail_d, tail_law, tail_alpha, tail_c, tail_n, tail_y,
                      tail_est, tail_reps, tail_inner, tail_spike, tail_cdf_reps,
                      tail_cdf_hor, tail_co);
    if (*expo) {
      if (!(exp_alpha >= 1.0 && exp_alpha < exp_d / 2.0)) {
        std::cerr << "regime violation: exponent recovery requires tail "
                     "exponent alpha in [1, d/2) (got alpha="
                  << exp_alpha << ", d=" << exp_d << ")\n";
        return 2;
      }
      return cmd_exponent(exp_d, exp_law, exp_alpha, exp_c, exp_ns, exp_y,
                          exp_outer, exp_inner, exp_no_spike, exp_cdf_reps,
                          exp_cdf_hor, exp_co);
    }
    if (*loc)
      return cmd_localization(loc_d, loc_law, loc_sides, loc_reps, loc_hor,
                              loc_rad, loc_co);
    if (*part)
      return cmd_partition(part_alpha, part_d, part_n, part_y, part_z,
                           part_chi_lo, part_chi_hi, part_check, part_co);
    if (*bell) return cmd_bellshape(bell_alpha, bell_c, bell_pairs, bell_bins, bell_co);
    if (*lb)
      return cmd_lower_bound(lb_d, lb_law, lb_alpha, lb_c, lb_n, lb_y, lb_k,
                             lb_scan, lb_cdf_reps, lb_cdf_hor, lb_co);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rwrs
