#pragma once

// Monte Carlo generation of small-sample quantile tables.
//
// For each n the N replications are cut into blocks of block_size. Block b
// draws from its own Philox stream keyed by (seed, n, b) and writes into its
// own slice of the output, so the draws are a function of the configuration
// alone. Workers only decide which block runs when.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/quantile_table.hpp"
#include "robust_t/rng.hpp"
#include "robust_t/statistics.hpp"

namespace robust_t {

inline constexpr std::uint64_t kDefaultSeed = 20190318;
inline constexpr std::uint64_t kMinReplications = 10'000;

struct SimulationConfig {
  std::uint64_t replications = 1'000'000;
  std::vector<int> sample_sizes;
  std::vector<double> probability_grid = publication_grid();
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t block_size = 16'384;
  StatisticKind statistic = StatisticKind::ta();
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  unsigned threads = 1;
  /// Data are drawn from N(location, scale^2) and the statistic is
  /// evaluated at mu = location.
  double location = 0.0;
  double scale = 1.0;
};

inline void validate(const SimulationConfig& cfg) {
  if (cfg.replications < kMinReplications) {
    throw Error(ErrorCode::InvalidConfig, "replications must be at least " + std::to_string(kMinReplications));
  }
  if (cfg.sample_sizes.empty()) throw Error(ErrorCode::InvalidConfig, "no sample sizes");
  for (int n : cfg.sample_sizes) {
    if (n < 4 || n > 0xFFFF) throw Error(ErrorCode::InvalidConfig, "sample sizes must lie in [4, 65535]");
  }
  validate_grid(cfg.probability_grid);
  if (cfg.block_size == 0) throw Error(ErrorCode::InvalidConfig, "block size must be positive");
  if ((cfg.replications + cfg.block_size - 1) / cfg.block_size > (std::uint64_t{1} << 40)) {
    throw Error(ErrorCode::InvalidConfig, "too many blocks");
  }
  if (!std::isfinite(cfg.location) || !(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) {
    throw Error(ErrorCode::InvalidConfig, "data distribution needs finite location and positive scale");
  }
}

/// Signed statistic draws for one n, in replication order.
struct SimulatedDraws {
  std::vector<double> values;
  std::uint64_t zero_scale_redraws = 0;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs task(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Task>
void parallel_for(std::uint64_t count, unsigned threads, Task&& task) {
  threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), count));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline SimulatedDraws simulate_statistics(const SimulationConfig& cfg, int n,
                                          StreamDomain domain = StreamDomain::TableGeneration) {
  validate(cfg);
  const std::uint64_t total = cfg.replications;
  const std::uint64_t blocks = (total + cfg.block_size - 1) / cfg.block_size;
  SimulatedDraws out;
  out.values.resize(total);
  std::vector<std::uint64_t> redraws(blocks, 0);

  detail::parallel_for(blocks, cfg.threads, [&](std::uint64_t b) {
    RandomStream stream(stream_key(cfg.seed, domain, static_cast<std::uint64_t>(n), b));
    detail::StatisticScratch scratch;
    std::vector<double> sample(static_cast<std::size_t>(n));
    const std::uint64_t first = b * cfg.block_size;
    const std::uint64_t last = std::min(total, first + cfg.block_size);
    for (std::uint64_t r = first; r < last; ++r) {
      for (;;) {
        for (double& x : sample) x = stream.normal(cfg.location, cfg.scale);
        const auto t = detail::try_evaluate(cfg.statistic, sample, cfg.location, scratch);
        if (t) {
          out.values[r] = *t;
          break;
        }
        ++redraws[b];
      }
    }
  });

  for (auto c : redraws) out.zero_scale_redraws += c;
  return out;
}

/// Progress hook: called after each n with the finished row's size.
using ProgressFn = std::function<void(int n, std::uint64_t zero_scale_redraws)>;

/**
 * Builds one table per grid from a single simulation pass: each grid is read
 * off the same sorted |T| draws, so a publication table and a dense table
 * generated together agree wherever their grids overlap.
 */
inline std::vector<QuantileTable> generate_tables(const SimulationConfig& cfg,
                                                  const std::vector<std::vector<double>>& grids,
                                                  const ProgressFn& progress = {}) {
  validate(cfg);
  if (grids.empty()) throw Error(ErrorCode::InvalidConfig, "no grids requested");
  for (const auto& g : grids) validate_grid(g);

  std::vector<QuantileTable::Rows> rows(grids.size());
  std::uint64_t redraws = 0;
  std::vector<int> sizes = cfg.sample_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (int n : sizes) {
    auto draws = simulate_statistics(cfg, n);
    for (double& v : draws.values) v = std::abs(v);
    std::sort(draws.values.begin(), draws.values.end());
    for (std::size_t g = 0; g < grids.size(); ++g) rows[g][n] = symmetric_quantile_row(draws.values, grids[g]);
    redraws += draws.zero_scale_redraws;
    if (progress) progress(n, draws.zero_scale_redraws);
  }

  TableMetadata meta;
  meta.replications = cfg.replications;
  meta.seed = cfg.seed;
  meta.zero_scale_redraws = redraws;
  std::vector<QuantileTable> tables;
  for (std::size_t g = 0; g < grids.size(); ++g) {
    tables.emplace_back(cfg.statistic, grids[g], std::move(rows[g]), meta);
  }
  return tables;
}

inline QuantileTable generate_table(const SimulationConfig& cfg, const ProgressFn& progress = {}) {
  return std::move(generate_tables(cfg, {cfg.probability_grid}, progress).front());
}

}  // namespace robust_t
