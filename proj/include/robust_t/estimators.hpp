#pragma once

// Location and scale estimators: median, MAD, Hodges-Lehmann and Shamos.
//
// The pairwise estimators never need the full set of pairs in memory once the
// sample is large: with the observations sorted, row i of the pair matrix
// (x_i + x_j)/2 or x_j - x_i is nondecreasing in j, so the k-th smallest
// entry can be found by randomized selection over per-row index windows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/sample.hpp"

namespace robust_t {

/// Which (i, j) index pairs enter the pairwise estimators.
enum class PairIndexConvention {
  Strict,     ///< i < j, n(n-1)/2 pairs
  Inclusive,  ///< i <= j, n(n+1)/2 pairs (adds the diagonal)
};

enum class PairKind {
  WalshAverage,   ///< (x_i + x_j) / 2
  AbsDifference,  ///< |x_i - x_j|
};

inline const char* to_string(PairIndexConvention c) {
  return c == PairIndexConvention::Strict ? "strict" : "inclusive";
}

inline constexpr std::size_t pair_count(std::size_t n, PairIndexConvention c) {
  return c == PairIndexConvention::Strict ? n * (n - 1) / 2 : n * (n + 1) / 2;
}

/// Below this sample size the pair set is materialized and partially sorted.
inline constexpr std::size_t kPairwiseSelectionThreshold = 32;

namespace detail {

struct PairwiseScratch {
  std::vector<double> values;
  std::vector<std::size_t> lo, hi, lt, le;
};

inline double pair_value(std::span<const double> sorted, PairKind kind, std::size_t i,
                         std::size_t j) {
  return kind == PairKind::WalshAverage ? (sorted[i] + sorted[j]) / 2.0 : sorted[j] - sorted[i];
}

inline std::size_t row_offset(PairIndexConvention c) {
  return c == PairIndexConvention::Strict ? 1 : 0;
}

inline void materialize_pairs(std::span<const double> sorted, PairKind kind,
                              PairIndexConvention c, std::vector<double>& out) {
  const std::size_t n = sorted.size();
  out.clear();
  out.reserve(pair_count(n, c));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + row_offset(c); j < n; ++j) out.push_back(pair_value(sorted, kind, i, j));
  }
}

// For every row i, the first column j >= i + offset with value(i, j) not
// satisfying pred (pred is "< pivot" or "<= pivot"). Rows are nondecreasing in
// j, and the boundary moves monotonically with i (left for Walsh averages,
// right for differences), so one staircase walk costs O(n). Floating-point
// rounding of a sum or difference is monotone, so this holds exactly.
template <class Pred>
void row_boundaries(std::span<const double> sorted, PairKind kind, std::size_t off, Pred pred,
                    std::vector<std::size_t>& out) {
  const std::size_t n = sorted.size();
  out.resize(n);
  if (kind == PairKind::WalshAverage) {
    std::size_t j = n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = std::min(i + off, n);
      j = std::max(j, start);
      while (j > start && !pred(pair_value(sorted, kind, i, j - 1))) --j;
      out[i] = j;
    }
  } else {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = std::min(i + off, n);
      j = std::max(j, start);
      while (j < n && pred(pair_value(sorted, kind, i, j))) ++j;
      out[i] = j;
    }
  }
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::size_t kPivotSample = 7;

/// k-th smallest (1-based) pairwise value of an ascending sample.
inline double pairwise_select_sorted(std::span<const double> sorted, PairKind kind,
                                     PairIndexConvention c, std::size_t k,
                                     PairwiseScratch& scratch) {
  const std::size_t n = sorted.size();
  const std::size_t total = pair_count(n, c);
  if (k < 1 || k > total) throw Error(ErrorCode::RankOutOfRange, "pair rank outside [1, pair count]");

  if (n < kPairwiseSelectionThreshold) {
    materialize_pairs(sorted, kind, c, scratch.values);
    std::nth_element(scratch.values.begin(), scratch.values.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     scratch.values.end());
    return scratch.values[k - 1];
  }

  auto& lo = scratch.lo;
  auto& hi = scratch.hi;
  auto& lt = scratch.lt;
  auto& le = scratch.le;
  lo.resize(n);
  hi.resize(n);
  lt.resize(n);
  le.resize(n);
  const std::size_t off = row_offset(c);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::min(i + off, n);
    hi[i] = n;
  }

  // Invariant: the answer lies in the union of the row windows [lo_i, hi_i),
  // and exactly `below` pairs have been discarded from the left.
  std::size_t below = 0;
  std::size_t candidates = total;
  std::uint64_t rng_state = 0x243F6A8885A308D3ULL ^ (static_cast<std::uint64_t>(n) << 32) ^ k;
  while (candidates > 4 * n) {
    // Pivot: of a few random candidates, the one whose rank among them
    // matches the target's relative rank among all candidates.
    std::array<double, kPivotSample> picks;
    for (auto& pick : picks) {
      std::uint64_t r = splitmix64(rng_state) % candidates;
      std::size_t row = 0;
      while (r >= hi[row] - lo[row]) {
        r -= hi[row] - lo[row];
        ++row;
      }
      pick = pair_value(sorted, kind, row, lo[row] + static_cast<std::size_t>(r));
    }
    std::sort(picks.begin(), picks.end());
    const double pivot = picks[(k - below - 1) * kPivotSample / candidates];

    row_boundaries(sorted, kind, off, [pivot](double v) { return v < pivot; }, lt);
    row_boundaries(sorted, kind, off, [pivot](double v) { return v <= pivot; }, le);
    std::size_t count_lt = below;
    std::size_t count_le = below;
    for (std::size_t i = 0; i < n; ++i) {
      lt[i] = std::clamp(lt[i], lo[i], hi[i]);
      le[i] = std::clamp(le[i], lo[i], hi[i]);
      count_lt += lt[i] - lo[i];
      count_le += le[i] - lo[i];
    }

    if (k <= count_lt) {
      hi.swap(lt);
      candidates = count_lt - below;
    } else if (k > count_le) {
      lo.swap(le);
      candidates -= count_le - below;
      below = count_le;
    } else {
      return pivot;
    }
  }

  auto& values = scratch.values;
  values.clear();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = lo[i]; j < hi[i]; ++j) values.push_back(pair_value(sorted, kind, i, j));
  }
  const std::size_t local = k - below - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(local), values.end());
  return values[local];
}

/// Median of the pairwise values of an ascending sample.
inline double pairwise_median_sorted(std::span<const double> sorted, PairKind kind,
                                     PairIndexConvention c, PairwiseScratch& scratch) {
  const std::size_t m = pair_count(sorted.size(), c);
  if (m == 0) throw Error(ErrorCode::SampleTooSmall, "no index pairs for this sample size");
  if (m % 2 == 1) return pairwise_select_sorted(sorted, kind, c, (m + 1) / 2, scratch);
  if (sorted.size() < kPairwiseSelectionThreshold) {
    materialize_pairs(sorted, kind, c, scratch.values);
    auto& v = scratch.values;
    const auto upper = v.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(v.begin(), upper, v.end());
    const double lower_value = *std::max_element(v.begin(), upper);
    return (lower_value + *upper) / 2.0;
  }
  // Lower middle by selection; the upper middle is either a tie with it or
  // the smallest value above it.
  const double a = pairwise_select_sorted(sorted, kind, c, m / 2, scratch);
  const std::size_t off = row_offset(c);
  auto& above = scratch.le;
  row_boundaries(sorted, kind, off, [a](double v) { return v <= a; }, above);
  std::size_t at_most_a = 0;
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::size_t start = std::min(i + off, sorted.size());
    at_most_a += above[i] - start;
    if (above[i] < sorted.size()) b = std::min(b, pair_value(sorted, kind, i, above[i]));
  }
  if (at_most_a > m / 2) b = a;
  return (a + b) / 2.0;
}

inline double median_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) throw Error(ErrorCode::EmptySample, "median of an empty sequence");
  return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

/// Median of an unordered buffer; reorders the buffer.
inline double median_inplace(std::span<double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorCode::EmptySample, "median of an empty sequence");
  const auto upper = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), upper, values.end());
  if (n % 2 == 1) return *upper;
  const double lower_value = *std::max_element(values.begin(), upper);
  return (lower_value + *upper) / 2.0;
}

inline double mad_sorted(std::span<const double> sorted, std::vector<double>& deviations) {
  const double center = median_sorted(sorted);
  deviations.resize(sorted.size());
  std::transform(sorted.begin(), sorted.end(), deviations.begin(),
                 [center](double v) { return std::abs(v - center); });
  return median_inplace(deviations);
}

inline std::vector<double> sorted_copy(const Sample& s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

/// Sample median; mean of the two middle order statistics for even n.
inline double median(const Sample& s) {
  std::vector<double> buffer(s.begin(), s.end());
  return detail::median_inplace(buffer);
}

/// Unscaled median absolute deviation about the median.
inline double mad(const Sample& s) {
  std::vector<double> deviations;
  return detail::mad_sorted(detail::sorted_copy(s), deviations);
}

/// k-th smallest (1-based) Walsh average or absolute pairwise difference.
inline double pairwise_select(const Sample& s, PairKind kind, PairIndexConvention c, std::size_t rank) {
  detail::PairwiseScratch scratch;
  return detail::pairwise_select_sorted(detail::sorted_copy(s), kind, c, rank, scratch);
}

/// Hodges-Lehmann location estimate: median of the Walsh averages.
inline double hodges_lehmann(const Sample& s, PairIndexConvention c = PairIndexConvention::Inclusive) {
  if (c == PairIndexConvention::Strict && s.size() < 2) {
    throw Error(ErrorCode::SampleTooSmall, "strict Hodges-Lehmann needs at least two observations");
  }
  detail::PairwiseScratch scratch;
  return detail::pairwise_median_sorted(detail::sorted_copy(s), PairKind::WalshAverage, c, scratch);
}

/// Shamos scale estimate: median of the absolute pairwise differences.
inline double shamos(const Sample& s, PairIndexConvention c = PairIndexConvention::Strict) {
  if (s.size() < 2) throw Error(ErrorCode::SampleTooSmall, "Shamos estimator needs at least two observations");
  detail::PairwiseScratch scratch;
  return detail::pairwise_median_sorted(detail::sorted_copy(s), PairKind::AbsDifference, c, scratch);
}

}  // namespace robust_t
