// Replica-parallel execution with reduction order fixed by block index, so a
// run's output depends on (seed, replica count) and never on the worker split.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

namespace rwrs {

/// Worker cap: RWRS_THREADS if set, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("RWRS_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Splits [0, total) into fixed-size blocks, evaluates block_fn(begin, end)
/// for each (workers steal blocks dynamically), then folds the per-block
/// results in block-index order. The fold order is what makes the reduction
/// independent of how blocks landed on threads.
template <typename Result, typename BlockFn, typename MergeFn>
Result parallel_reduce(std::int64_t total, std::int64_t block_size, Result init,
                       BlockFn block_fn, MergeFn merge) {
  if (total <= 0) return init;
  if (block_size <= 0) block_size = 1;
  const std::int64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<Result> partial(static_cast<std::size_t>(n_blocks));

  int workers = worker_count();
  if (workers > n_blocks) workers = static_cast<int>(n_blocks);

  if (workers <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) {
      std::int64_t lo = b * block_size;
      std::int64_t hi = std::min(total, lo + block_size);
      partial[static_cast<std::size_t>(b)] = block_fn(lo, hi);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
      for (;;) {
        std::int64_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        std::int64_t lo = b * block_size;
        std::int64_t hi = std::min(total, lo + block_size);
        partial[static_cast<std::size_t>(b)] = block_fn(lo, hi);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  Result acc = init;
  for (auto& p : partial) acc = merge(acc, p);
  return acc;
}

/// Streaming sum of positive terms given in log scale, tracking sum and sum of
/// squares relative to the running maximum. Merging two accumulators is exact
/// up to the usual rescaling, so block folds stay associative in practice.
struct LogAccumulator {
  double max_log = -std::numeric_limits<double>::infinity();
  double sum = 0.0;     // sum of exp(log_v - max_log)
  double sum_sq = 0.0;  // sum of exp(2 (log_v - max_log))
  std::int64_t count = 0;

  void add(double log_v) {
    ++count;
    if (std::isinf(log_v) && log_v < 0) return;
    if (log_v > max_log) {
      if (count > 1 && std::isfinite(max_log)) {
        double r = std::exp(max_log - log_v);
        sum *= r;
        sum_sq *= r * r;
      }
      max_log = log_v;
      sum += 1.0;
      sum_sq += 1.0;
    } else {
      double r = std::exp(log_v - max_log);
      sum += r;
      sum_sq += r * r;
    }
  }

  void merge(const LogAccumulator& o) {
    if (o.count == 0) {
      return;
    }
    if (count == 0) {
      *this = o;
      return;
    }
    if (o.max_log > max_log) {
      double r = std::isfinite(max_log) ? std::exp(max_log - o.max_log) : 0.0;
      sum = sum * r + o.sum;
      sum_sq = sum_sq * r * r + o.sum_sq;
      max_log = o.max_log;
    } else {
      double r = std::isfinite(o.max_log) ? std::exp(o.max_log - max_log) : 0.0;
      sum += o.sum * r;
      sum_sq += o.sum_sq * r * r;
    }
    count += o.count;
  }

  bool empty_mass() const { return sum <= 0.0 || !std::isfinite(max_log); }

  /// log of the plain sum of terms.
  double log_sum() const {
    if (empty_mass()) return -std::numeric_limits<double>::infinity();
    return max_log + std::log(sum);
  }

  /// log of the mean term.
  double log_mean() const {
    if (empty_mass()) return -std::numeric_limits<double>::infinity();
    return max_log + std::log(sum / static_cast<double>(count));
  }

  /// Relative standard error of the mean: sd(terms) / (sqrt(n) * mean).
  double relative_se() const {
    if (empty_mass() || count < 2) return std::numeric_limits<double>::infinity();
    double n = static_cast<double>(count);
    double mean_rel = sum / n;
    double var_rel = sum_sq / n - mean_rel * mean_rel;
    if (var_rel < 0.0) var_rel = 0.0;
    return std::sqrt(var_rel / n) / mean_rel;
  }
};

}  // namespace rwrs
