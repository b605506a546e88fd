#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rwrs/cli.hpp"

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("rwrs");
  for (const auto& a : args) argv.push_back(a.c_str());
  return rwrs::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/rwrs_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("missing --seed fails validation with exit 2") {
  CHECK(run({"simulate", "--n", "100"}) == 2);
}

TEST_CASE("unknown flag fails with exit 2") {
  CHECK(run({"simulate", "--n", "100", "--seed", "1", "--bogus", "3"}) == 2);
}

TEST_CASE("unknown subcommand fails with exit 2") {
  CHECK(run({"frobnicate", "--seed", "1"}) == 2);
}

TEST_CASE("out-of-range parameters fail validation") {
  CHECK(run({"moments", "--d", "1", "--alpha", "0.5", "--n", "100",
             "--seed", "1"}) == 2);
  CHECK(run({"partition", "--alpha", "2", "--d", "4", "--n", "10000",
             "--seed", "1"}) == 2);  // regime violation: alpha >= d/2
}

TEST_CASE("exponent subcommand enforces the regime hypothesis") {
  CHECK(run({"exponent", "--d", "3", "--alpha", "2", "--c", "1", "--y", "1",
             "--n", "64,128,256", "--replicas", "10", "--seed", "1"}) == 2);
}

TEST_CASE("simulate writes a deterministic table") {
  TempFile a("sim_a.csv"), b("sim_b.csv");
  std::vector<std::string> args{"simulate", "--d",   "3",    "--n", "5000",
                                "--seed",   "42",    "--out", a.path};
  CHECK(run(args) == 0);
  args.back() = b.path;
  CHECK(run(args) == 0);
  std::string ca = slurp(a.path);
  CHECK(!ca.empty());
  CHECK(ca == slurp(b.path));
  CHECK(ca.rfind("d,law,n,seed,", 0) == 0);  // header row first
}

TEST_CASE("tail subcommand emits the audit columns") {
  TempFile out("tail.csv");
  CHECK(run({"tail", "--d", "3", "--alpha", "2", "--c", "1", "--n", "64",
             "--y", "0.3", "--estimator", "naive", "--replicas", "20000",
             "--seed", "7", "--out", out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(text.find("estimator,") != std::string::npos);
  CHECK(text.find("naive,") != std::string::npos);
  CHECK(text.find(",7") != std::string::npos);  // seed lands in the row
}

TEST_CASE("json-lines output parses as one object per row") {
  TempFile out("tail.jsonl");
  CHECK(run({"tail", "--d", "3", "--alpha", "2", "--c", "1", "--n", "32",
             "--y", "0.3", "--estimator", "naive", "--replicas", "5000",
             "--seed", "7", "--format", "json-lines", "--out", out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(text.rfind("{", 0) == 0);
  CHECK(text.find("\"estimator\":\"naive\"") != std::string::npos);
  CHECK(text.find("\"log_p\":") != std::string::npos);
}

TEST_CASE("partition subcommand serializes the scheme and audits samples") {
  TempFile out("part.txt");
  CHECK(run({"partition", "--alpha", "2", "--d", "5", "--n", "2000", "--y",
             "0.5", "--check-replicas", "50", "--seed", "3", "--out",
             out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(text.find("delta0 ") != std::string::npos);
  CHECK(text.find("decomposition_violations 0") != std::string::npos);
}

TEST_CASE("lower-bound subcommand matches across runs with one seed") {
  TempFile a("lb_a.csv"), b("lb_b.csv");
  std::vector<std::string> args{
      "lower-bound", "--d", "3", "--alpha", "1", "--c", "1", "--n", "128",
      "--y", "1", "--cdf-replicas", "20000", "--cdf-horizon", "5000",
      "--seed", "11", "--out", a.path};
  CHECK(run(args) == 0);
  args.back() = b.path;
  CHECK(run(args) == 0);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("naive and tilted rows overlap at moderate y") {
  TempFile na("nv.csv"), ti("ti.csv");
  CHECK(run({"tail", "--d", "3", "--alpha", "2", "--c", "1", "--n", "64",
             "--y", "0.25", "--estimator", "naive", "--replicas", "40000",
             "--seed", "77", "--out", na.path}) == 0);
  CHECK(run({"tail", "--d", "3", "--alpha", "2", "--c", "1", "--n", "64",
             "--y", "0.25", "--estimator", "tilted", "--replicas", "4000",
             "--inner", "8", "--seed", "77", "--out", ti.path}) == 0);
  // Row layout: estimator,d,alpha,n,y,log_p,p,se_log,...
  auto field = [](const std::string& text, int idx) {
    std::size_t pos = text.find('\n') + 1;
    for (int i = 0; i < idx; ++i) pos = text.find(',', pos) + 1;
    return std::stod(text.substr(pos));
  };
  std::string nv = slurp(na.path), tl = slurp(ti.path);
  double p_nv = field(nv, 6), se_nv = field(nv, 7) * p_nv;
  double p_tl = field(tl, 6), se_tl = field(tl, 7) * p_tl;
  CHECK(std::abs(p_nv - p_tl) <= 3.0 * std::hypot(se_nv, se_tl));
}

TEST_CASE("exponent pipeline emits per-n rows plus the fitted slope") {
  TempFile out("expo.csv");
  CHECK(run({"exponent", "--d", "3", "--alpha", "1", "--c", "1", "--y", "1",
             "--n", "64,128,256", "--replicas", "400", "--inner", "4",
             "--cdf-replicas", "20000", "--cdf-horizon", "10000", "--seed", "7",
             "--out", out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(text.find("fitted_slope") != std::string::npos);
  CHECK(text.find("lower_bound") != std::string::npos);
  // one header + three data rows
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("unwritable output path is a runtime error, exit 1") {
  CHECK(run({"simulate", "--n", "10", "--seed", "1", "--out",
             "/nonexistent-dir/x.csv"}) == 1);
}

TEST_CASE("config file supplies defaults, flags win") {
  TempFile cfg("conf.ini"), out("mom.csv");
  {
    std::ofstream f(cfg.path);
    f << "[moments]\nd=3\nreplicas=500\n";
  }
  CHECK(run({"--config", cfg.path, "moments", "--alpha", "2", "--n", "100",
             "--d", "1", "--seed", "5", "--out", out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(text.find("\n1,") != std::string::npos);   // flag --d 1 overrode the file
  CHECK(text.find(",500,") != std::string::npos);  // file replicas applied
}
