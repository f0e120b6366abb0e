#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/estimators.hpp"
#include "robust_t/normal.hpp"
#include "robust_t/sample.hpp"

namespace robust_t {

enum class Statistic { TA, TB, Student };

/// Tag for one of the pivotal statistics. T_B carries the pair-index
/// convention used by both of its pairwise estimators.
struct StatisticKind {
  Statistic tag = Statistic::TA;
  PairIndexConvention convention = PairIndexConvention::Strict;

  static StatisticKind ta() { return {Statistic::TA, PairIndexConvention::Strict}; }
  static StatisticKind tb(PairIndexConvention c = PairIndexConvention::Strict) { return {Statistic::TB, c}; }
  static StatisticKind student() { return {Statistic::Student, PairIndexConvention::Strict}; }

  friend bool operator==(const StatisticKind& a, const StatisticKind& b) {
    if (a.tag != b.tag) return false;
    return a.tag != Statistic::TB || a.convention == b.convention;
  }
};

inline std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::TA: return "ta";
    case Statistic::TB: return "tb";
    case Statistic::Student: return "student";
  }
  return "unknown";
}

inline std::string display_name(const StatisticKind& k) {
  switch (k.tag) {
    case Statistic::TA: return "T_A";
    case Statistic::TB: return "T_B";
    case Statistic::Student: return "Student";
  }
  return "unknown";
}

inline std::optional<Statistic> parse_statistic(const std::string& s) {
  if (s == "ta") return Statistic::TA;
  if (s == "tb") return Statistic::TB;
  if (s == "student") return Statistic::Student;
  return std::nullopt;
}

namespace detail {

// Reusable buffers for evaluating a statistic many times without allocating.
struct StatisticScratch {
  std::vector<double> sorted;
  std::vector<double> deviations;
  PairwiseScratch pairs;
};

struct LocationScale {
  double location;
  double scale;
};

inline LocationScale ta_parts(std::span<const double> sorted, StatisticScratch& scratch) {
  return {median_sorted(sorted), mad_sorted(sorted, scratch.deviations)};
}

inline LocationScale tb_parts(std::span<const double> sorted, PairIndexConvention c,
                              StatisticScratch& scratch) {
  return {pairwise_median_sorted(sorted, PairKind::WalshAverage, c, scratch.pairs),
          pairwise_median_sorted(sorted, PairKind::AbsDifference, c, scratch.pairs)};
}

inline LocationScale student_parts(std::span<const double> values) {
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  // A constant sample has S = 0 even when the rounded mean is off by an ulp.
  if (*min_it == *max_it) return {mean, 0.0};
  return {mean, std::sqrt(ss / (n - 1.0))};
}

/// Location estimate and raw scale estimate for the statistic, plus the
/// multiplier K such that T = K * (location - mu) / scale.
struct StatisticParts {
  double location;
  double scale;
  double multiplier;
};

inline StatisticParts statistic_parts(const StatisticKind& kind, std::span<const double> values,
                                      StatisticScratch& scratch) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::SampleTooSmall, "statistic needs at least two observations");
  if (kind.tag == Statistic::Student) {
    const auto p = student_parts(values);
    return {p.location, p.scale, std::sqrt(static_cast<double>(n))};
  }
  scratch.sorted.assign(values.begin(), values.end());
  std::sort(scratch.sorted.begin(), scratch.sorted.end());
  if (kind.tag == Statistic::TA) {
    const auto p = ta_parts(scratch.sorted, scratch);
    return {p.location, p.scale, NormalConstants::scale_ta(n)};
  }
  const auto p = tb_parts(scratch.sorted, kind.convention, scratch);
  return {p.location, p.scale, NormalConstants::scale_tb(n)};
}

/// Statistic value, or nullopt when the scale estimate is zero.
inline std::optional<double> try_evaluate(const StatisticKind& kind, std::span<const double> values,
                                          double mu, StatisticScratch& scratch) {
  const auto p = statistic_parts(kind, values, scratch);
  if (!(p.scale > 0.0)) return std::nullopt;
  return p.multiplier * (p.location - mu) / p.scale;
}

}  // namespace detail

/// Evaluates any of the three statistics at hypothesized location mu.
inline double evaluate(const StatisticKind& kind, const Sample& s, double mu) {
  detail::StatisticScratch scratch;
  const auto t = detail::try_evaluate(kind, s.values(), mu, scratch);
  if (!t) {
    throw Error(ErrorCode::ZeroScale, display_name(kind) + " undefined: scale estimate is zero");
  }
  return *t;
}

/// sqrt(2n/pi) Phi^{-1}(3/4) (median - mu) / MAD.
inline double t_a(const Sample& s, double mu) { return evaluate(StatisticKind::ta(), s, mu); }

/// sqrt(6n/pi) Phi^{-1}(3/4) (Hodges-Lehmann - mu) / Shamos.
inline double t_b(const Sample& s, double mu, PairIndexConvention c = PairIndexConvention::Strict) {
  return evaluate(StatisticKind::tb(c), s, mu);
}

/// (mean - mu) / (S / sqrt(n)) with the n-1 variance denominator.
inline double student_t(const Sample& s, double mu) { return evaluate(StatisticKind::student(), s, mu); }

}  // namespace robust_t
