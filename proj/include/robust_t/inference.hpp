#pragma once

#include <cmath>
#include <optional>

#include "robust_t/errors.hpp"
#include "robust_t/quantile_table.hpp"
#include "robust_t/sample.hpp"
#include "robust_t/statistics.hpp"
#include "robust_t/student_t_distribution.hpp"

namespace robust_t {

struct ConfidenceInterval {
  double lower;
  double upper;
  double alpha1;  ///< tail probability allotted above the interval
  double alpha2;  ///< tail probability allotted below the interval
  StatisticKind method;

  double length() const { return upper - lower; }
  bool contains(double mu) const { return lower <= mu && mu <= upper; }
};

struct TestResult {
  double statistic_value;
  double critical_value;
  std::optional<double> p_value;
  bool reject;
  double mu0;
  double alpha;
  StatisticKind method;
  Alternative alternative = Alternative::TwoSided;
  bool normal_fallback = false;
};

/// The upper-alpha quantile of the tabled statistic, i.e. the value exceeded
/// with probability alpha. Tables store lower quantiles; this is the only
/// place the two are converted.
inline QuantileLookup upper_quantile(const QuantileTable& table, int n, double alpha) {
  return lookup_quantile(table, n, 1.0 - alpha);
}

namespace detail {

inline void check_alpha(double a, const char* name) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidProbability, std::string(name) + " must lie in (0, 1)");
}

inline void check_table(const QuantileTable& table, const StatisticKind& method) {
  if (!(table.statistic() == method)) {
    throw Error(ErrorCode::TableMismatch, "table is for " + display_name(table.statistic()) + " (" +
                                              to_string(table.statistic().convention) + "), not " +
                                              display_name(method));
  }
}

// Location, raw scale and K for T = K (location - mu) / scale, with ZeroScale
// raised for a zero scale estimate.
inline StatisticParts checked_parts(const StatisticKind& kind, const Sample& s) {
  StatisticScratch scratch;
  const auto parts = statistic_parts(kind, s.values(), scratch);
  if (!(parts.scale > 0.0)) {
    throw Error(ErrorCode::ZeroScale, display_name(kind) + " undefined: scale estimate is zero");
  }
  return parts;
}

inline ConfidenceInterval table_interval(const StatisticKind& kind, const Sample& s, double alpha1,
                                         double alpha2, const QuantileTable& table) {
  check_alpha(alpha1, "alpha1");
  check_alpha(alpha2, "alpha2");
  if (!(alpha1 + alpha2 < 1.0)) throw Error(ErrorCode::InvalidProbability, "alpha1 + alpha2 must be below 1");
  check_table(table, kind);
  const auto parts = checked_parts(kind, s);
  const int n = static_cast<int>(s.size());
  // Solve q_lower(alpha1) <= K (est - mu) / scale <= q_upper(alpha2) for mu;
  // by symmetry q_lower(alpha1) = -q_upper(alpha1).
  const double q_low_side = upper_quantile(table, n, alpha2).value;
  const double q_high_side = upper_quantile(table, n, alpha1).value;
  const double unit = parts.scale / parts.multiplier;
  return {parts.location - q_low_side * unit, parts.location + q_high_side * unit, alpha1, alpha2, kind};
}

}  // namespace detail

/// Median/MAD interval from T_A table quantiles.
inline ConfidenceInterval ci_ta(const Sample& s, double alpha1, double alpha2, const QuantileTable& table) {
  return detail::table_interval(StatisticKind::ta(), s, alpha1, alpha2, table);
}

/// Hodges-Lehmann/Shamos interval from T_B table quantiles; the pair-index
/// convention is taken from the table.
inline ConfidenceInterval ci_tb(const Sample& s, double alpha1, double alpha2, const QuantileTable& table) {
  return detail::table_interval(StatisticKind::tb(table.statistic().convention), s, alpha1, alpha2, table);
}

/// mean -/+ t_{1-alpha/2, n-1} S / sqrt(n).
inline ConfidenceInterval ci_student(const Sample& s, double alpha) {
  detail::check_alpha(alpha, "alpha");
  const auto parts = detail::checked_parts(StatisticKind::student(), s);
  const double t = student_t_quantile(1.0 - alpha / 2.0, static_cast<double>(s.size() - 1));
  const double half = t * parts.scale / parts.multiplier;
  return {parts.location - half, parts.location + half, alpha / 2.0, alpha / 2.0, StatisticKind::student()};
}

/// Student interval with tail alpha1 above and alpha2 below.
inline ConfidenceInterval ci_student(const Sample& s, double alpha1, double alpha2) {
  detail::check_alpha(alpha1, "alpha1");
  detail::check_alpha(alpha2, "alpha2");
  if (!(alpha1 + alpha2 < 1.0)) throw Error(ErrorCode::InvalidProbability, "alpha1 + alpha2 must be below 1");
  const auto parts = detail::checked_parts(StatisticKind::student(), s);
  const double df = static_cast<double>(s.size() - 1);
  const double unit = parts.scale / parts.multiplier;
  return {parts.location - student_t_quantile(1.0 - alpha2, df) * unit,
          parts.location + student_t_quantile(1.0 - alpha1, df) * unit, alpha1, alpha2, StatisticKind::student()};
}

/// Equi-tailed 1 - alpha interval for any method. `table` is ignored for Student.
inline ConfidenceInterval confidence_interval(const StatisticKind& method, const Sample& s, double alpha,
                                              const QuantileTable* table) {
  if (method.tag == Statistic::Student) return ci_student(s, alpha);
  if (!table) throw Error(ErrorCode::TableMissing, display_name(method) + " needs a quantile table");
  return detail::table_interval(method, s, alpha / 2.0, alpha / 2.0, *table);
}

/**
 * Test of H0: mu = mu0 at level alpha.
 *
 * Two-sided: reject iff |T| exceeds the upper alpha/2 quantile, which is
 * exactly "mu0 lies outside the equi-tailed 1 - alpha interval". One-sided
 * alternatives use the upper alpha quantile on the matching side. A p-value
 * is attached for Student always and for T_A/T_B when the table's grid is
 * dense enough.
 */
inline TestResult test_mu(const Sample& s, double mu0, double alpha, const StatisticKind& method,
                          const QuantileTable* table, Alternative alternative = Alternative::TwoSided) {
  detail::check_alpha(alpha, "alpha");
  if (!std::isfinite(mu0)) throw Error(ErrorCode::NonFiniteValue, "mu0 is not finite");
  const auto parts = detail::checked_parts(method, s);
  const double t = parts.multiplier * (parts.location - mu0) / parts.scale;
  const int n = static_cast<int>(s.size());
  const double tail = alternative == Alternative::TwoSided ? alpha / 2.0 : alpha;

  TestResult result{};
  result.statistic_value = t;
  result.mu0 = mu0;
  result.alpha = alpha;
  result.method = method;
  result.alternative = alternative;

  if (method.tag == Statistic::Student) {
    const double df = static_cast<double>(n - 1);
    result.critical_value = student_t_quantile(1.0 - tail, df);
    const double upper_tail = 1.0 - student_t_cdf(std::abs(t), df);
    switch (alternative) {
      case Alternative::TwoSided: result.p_value = 2.0 * upper_tail; break;
      case Alternative::Greater: result.p_value = 1.0 - student_t_cdf(t, df); break;
      case Alternative::Less: result.p_value = student_t_cdf(t, df); break;
    }
  } else {
    if (!table) throw Error(ErrorCode::TableMissing, display_name(method) + " needs a quantile table");
    detail::check_table(*table, method);
    const auto q = upper_quantile(*table, n, tail);
    result.critical_value = q.value;
    result.normal_fallback = q.normal_fallback;
    if (table->supports_p_values()) result.p_value = p_value(*table, n, t, alternative);
  }

  switch (alternative) {
    case Alternative::TwoSided: result.reject = std::abs(t) > result.critical_value; break;
    case Alternative::Greater: result.reject = t > result.critical_value; break;
    case Alternative::Less: result.reject = t < -result.critical_value; break;
  }
  return result;
}

}  // namespace robust_t
