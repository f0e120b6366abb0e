#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/normal.hpp"
#include "robust_t/statistics.hpp"

namespace robust_t {

inline constexpr const char* kGeneratorVersion = "1";

/// Probabilities tabulated for publication: 0.60 ... 0.995.
inline std::vector<double> publication_grid() {
  return {0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.975, 0.98, 0.99, 0.995};
}

/// 999 probabilities 0.5005, 0.5010, ..., 0.9995 for p-value service.
inline std::vector<double> dense_grid() {
  std::vector<double> grid;
  grid.reserve(999);
  for (int k = 1001; k <= 1999; ++k) grid.push_back(k / 2000.0);
  return grid;
}

/// Largest knot spacing (counting the centre p = 0.5) a grid may have and
/// still be used for p-values.
inline constexpr double kPValueMaxGridSpacing = 0.001;

// Relative tolerance used when matching a probability to a grid knot.
inline constexpr double kKnotTolerance = 1e-12;

inline void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "probability grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.5 && grid[i] < 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "grid probabilities must lie in (0.5, 1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "grid probabilities must be strictly increasing");
    }
  }
}

inline double max_grid_spacing(std::span<const double> grid) {
  double gap = grid.empty() ? 1.0 : grid.front() - 0.5;
  for (std::size_t i = 1; i < grid.size(); ++i) gap = std::max(gap, grid[i] - grid[i - 1]);
  return gap;
}

/// 1-based rank ceil(p * count), guarded against p * count landing an ulp
/// above an integer.
inline std::size_t quantile_rank(double p, std::size_t count) {
  const double x = p * static_cast<double>(count);
  const double guarded = x - 64.0 * std::numeric_limits<double>::epsilon() * x;
  const auto rank = static_cast<std::size_t>(std::ceil(guarded));
  return std::clamp<std::size_t>(rank, 1, count);
}

/// Inverse-ECDF quantile: the order statistic at rank ceil(p * N).
inline double empirical_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidProbability, "need 0 < p < 1");
  std::vector<double> copy(values.begin(), values.end());
  const std::size_t k = quantile_rank(p, copy.size()) - 1;
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k), copy.end());
  return copy[k];
}

/// q_p for a distribution symmetric about zero, read from ascending |T|
/// draws: q_p = G^{-1}(2p - 1) where G is the CDF of |T|.
inline std::vector<double> symmetric_quantile_row(std::span<const double> sorted_abs,
                                                  std::span<const double> grid) {
  if (sorted_abs.empty()) throw Error(ErrorCode::EmptyInput, "no draws");
  std::vector<double> row;
  row.reserve(grid.size());
  for (double p : grid) row.push_back(sorted_abs[quantile_rank(2.0 * p - 1.0, sorted_abs.size()) - 1]);
  return row;
}

struct TableMetadata {
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::string generator_version = kGeneratorVersion;
  std::uint64_t zero_scale_redraws = 0;
};

/// Per-n upper-half quantiles q_p (p > 0.5) of one statistic. Immutable.
class QuantileTable {
 public:
  using Rows = std::map<int, std::vector<double>>;

  QuantileTable(StatisticKind statistic, std::vector<double> grid, Rows rows, TableMetadata meta)
      : statistic_(statistic), grid_(std::move(grid)), rows_(std::move(rows)), meta_(std::move(meta)) {
    validate_grid(grid_);
    if (rows_.empty()) throw Error(ErrorCode::TableFormat, "table has no rows");
    for (const auto& [n, row] : rows_) {
      if (row.size() != grid_.size()) throw Error(ErrorCode::TableFormat, "row width differs from grid");
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i]) || row[i] < 0.0) {
          throw Error(ErrorCode::TableFormat, "quantiles must be finite and non-negative");
        }
        if (i > 0 && row[i] < row[i - 1]) throw Error(ErrorCode::TableFormat, "row is not monotone in p");
      }
    }
  }

  const StatisticKind& statistic() const noexcept { return statistic_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const Rows& rows() const noexcept { return rows_; }
  const TableMetadata& metadata() const noexcept { return meta_; }

  int min_n() const { return rows_.begin()->first; }
  int max_n() const { return rows_.rbegin()->first; }

  const std::vector<double>* find_row(int n) const {
    const auto it = rows_.find(n);
    return it == rows_.end() ? nullptr : &it->second;
  }

  bool supports_p_values() const { return max_grid_spacing(grid_) <= kPValueMaxGridSpacing + 1e-12; }

 private:
  StatisticKind statistic_;
  std::vector<double> grid_;
  Rows rows_;
  TableMetadata meta_;
};

struct QuantileLookup {
  double value;
  /// Set when n is above the tabled range and Phi^{-1}(p) was returned.
  bool normal_fallback = false;
};

namespace detail {

// The row lookup shared by lookup_quantile and p_value. Returns nullptr when
// n is above the tabled range.
inline const std::vector<double>* row_for(const QuantileTable& t, int n) {
  if (n < t.min_n()) {
    throw Error(ErrorCode::SampleSizeBelowTable,
                "n = " + std::to_string(n) + " is below the smallest tabled n = " + std::to_string(t.min_n()));
  }
  if (n > t.max_n()) return nullptr;
  const auto* row = t.find_row(n);
  if (!row) throw Error(ErrorCode::RowMissing, "table has no row for n = " + std::to_string(n));
  return row;
}

inline bool same_probability(double a, double b) {
  return std::abs(a - b) <= kKnotTolerance * std::max(1.0, std::abs(b));
}

// Linear interpolation of q over the knots (0.5, 0), (grid_k, q_k).
inline double interpolate_upper(std::span<const double> grid, std::span<const double> row, double p) {
  if (p > grid.back() && !same_probability(p, grid.back())) {
    throw Error(ErrorCode::ProbabilityOutsideGrid,
                "p = " + std::to_string(p) + " lies beyond the grid (max " + std::to_string(grid.back()) + ")");
  }
  double p_lo = 0.5;
  double q_lo = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (same_probability(p, grid[k])) return row[k];
    if (p < grid[k]) {
      const double w = (p - p_lo) / (grid[k] - p_lo);
      return q_lo + w * (row[k] - q_lo);
    }
    p_lo = grid[k];
    q_lo = row[k];
  }
  return row.back();
}

}  // namespace detail

/**
 * Quantile q_p of the tabled statistic at sample size n.
 *
 * Upper half (p > 0.5): linear interpolation on the row, with the symmetry
 * centre (0.5, 0) as an extra knot. Lower half by q_{1-p} = -q_p. Above the
 * tabled range of n the normal limit is returned and flagged.
 */
inline QuantileLookup lookup_quantile(const QuantileTable& t, int n, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidProbability, "need 0 < p < 1");
  const auto* row = detail::row_for(t, n);
  if (!row) return {normal_quantile(p), true};
  if (p == 0.5) return {0.0, false};
  if (p < 0.5) return {-detail::interpolate_upper(t.grid(), *row, 1.0 - p), false};
  return {detail::interpolate_upper(t.grid(), *row, p), false};
}

enum class Alternative { TwoSided, Greater, Less };

inline const char* to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "unknown";
}

/**
 * p-value of an observed statistic, from the row's G map (|T| CDF).
 *
 * G is the piecewise-linear inverse of q_p at level 2p - 1, with G(0) = 0.
 * Beyond the last knot G saturates, so the two-sided p-value never drops
 * below 2(1 - p_max): the grid-resolution floor.
 */
inline double p_value(const QuantileTable& t, int n, double t_obs, Alternative alternative) {
  if (!std::isfinite(t_obs)) throw Error(ErrorCode::NonFiniteValue, "observed statistic is not finite");
  if (!t.supports_p_values()) {
    throw Error(ErrorCode::GridTooCoarse, "p-values need a dense-grid table (spacing <= 0.001)");
  }
  const auto* row = detail::row_for(t, n);
  const auto& grid = t.grid();
  const double x = std::abs(t_obs);

  double two_sided;
  double floor;
  if (!row) {
    two_sided = 2.0 * (1.0 - normal_cdf(x));
    floor = 0.0;
  } else {
    floor = 2.0 * (1.0 - grid.back());
    double g = 2.0 * grid.back() - 1.0;
    double q_lo = 0.0;
    double g_lo = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double q_hi = (*row)[k];
      const double g_hi = 2.0 * grid[k] - 1.0;
      if (x <= q_hi) {
        g = q_hi > q_lo ? g_lo + (x - q_lo) / (q_hi - q_lo) * (g_hi - g_lo) : g_hi;
        break;
      }
      q_lo = q_hi;
      g_lo = g_hi;
    }
    two_sided = std::clamp(1.0 - g, floor, 1.0);
  }

  switch (alternative) {
    case Alternative::TwoSided:
      return two_sided;
    case Alternative::Greater:
      return t_obs >= 0.0 ? std::clamp(two_sided / 2.0, floor / 2.0, 1.0) : 1.0 - two_sided / 2.0;
    case Alternative::Less:
      return t_obs <= 0.0 ? std::clamp(two_sided / 2.0, floor / 2.0, 1.0) : 1.0 - two_sided / 2.0;
  }
  return two_sided;
}

/// Monte Carlo precision of one tabled quantile.
struct QuantileAccuracy {
  double p;
  std::uint64_t replications;
  /// Finite-difference density of the statistic at q_p.
  double density_estimate;
  /// Standard error of q_p when read through the |T| distribution.
  double stderr_estimate;
};

/**
 * Standard error of an empirical quantile built from N draws of |T|.
 *
 * The density f of T at q_p is estimated by a central difference between the
 * neighbouring knots of the row (the centre (0.5, 0) counts as a knot). Since
 * q_p is read as the (2p - 1) quantile of |T|, whose density there is 2f,
 * the asymptotic standard error is sqrt(p'(1 - p') / N) / (2f), p' = 2p - 1.
 */
inline QuantileAccuracy quantile_accuracy(double p, std::uint64_t replications, std::span<const double> grid,
                                          std::span<const double> row) {
  if (!(p > 0.5 && p < 1.0)) throw Error(ErrorCode::InvalidProbability, "need 0.5 < p < 1");
  if (replications == 0) throw Error(ErrorCode::InvalidConfig, "replication count must be positive");
  if (grid.size() != row.size()) throw Error(ErrorCode::TableFormat, "row width differs from grid");

  std::vector<double> ps{0.5};
  std::vector<double> qs{0.0};
  ps.insert(ps.end(), grid.begin(), grid.end());
  qs.insert(qs.end(), row.begin(), row.end());

  std::size_t below = ps.size();
  std::size_t above = ps.size();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (detail::same_probability(p, ps[k])) continue;
    if (ps[k] < p) below = k;
    if (ps[k] > p && above == ps.size()) above = k;
  }
  if (below == ps.size() || above == ps.size()) {
    throw Error(ErrorCode::InsufficientGridPoints, "need grid points on both sides of p = " + std::to_string(p));
  }
  const double dq = qs[above] - qs[below];
  if (!(dq > 0.0)) throw Error(ErrorCode::InsufficientGridPoints, "flat row segment around p");
  const double density = (ps[above] - ps[below]) / dq;
  const double pg = 2.0 * p - 1.0;
  const double se = std::sqrt(pg * (1.0 - pg) / static_cast<double>(replications)) / (2.0 * density);
  return {p, replications, density, se};
}

inline QuantileAccuracy quantile_accuracy(const QuantileTable& t, int n, double p) {
  const auto* row = t.find_row(n);
  if (!row) throw Error(ErrorCode::RowMissing, "table has no row for n = " + std::to_string(n));
  return quantile_accuracy(p, t.metadata().replications, t.grid(), *row);
}

}  // namespace robust_t
