#pragma once

// The two illustrative studies (outlier sensitivity of the interval, and
// empirical power with and without a contaminated observation) plus a
// normal-limit convergence diagnostic. All emit plot-ready rows.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/inference.hpp"
#include "robust_t/normal.hpp"
#include "robust_t/quantile_table.hpp"
#include "robust_t/rng.hpp"
#include "robust_t/simulation.hpp"
#include "robust_t/table_io.hpp"

namespace robust_t {

/// Butterfat yields (pounds) for twenty cows.
inline std::vector<double> butterfat_data() {
  return {481, 537, 513, 583, 453, 510, 570, 500, 457, 555,
          618, 327, 350, 643, 499, 421, 505, 637, 599, 392};
}

inline std::vector<double> linear_grid(double first, double last, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::InvalidConfig, "a grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

/// The T_A and T_B tables an experiment draws critical values from.
struct TablePair {
  const QuantileTable* ta = nullptr;
  const QuantileTable* tb = nullptr;
};

/// Student, T_A, T_B; T_B takes its pair-index convention from its table.
inline std::array<StatisticKind, 3> study_methods(const TablePair& tables) {
  return {StatisticKind::student(), StatisticKind::ta(),
          StatisticKind::tb(tables.tb ? tables.tb->statistic().convention : PairIndexConvention::Strict)};
}

namespace detail {

inline const QuantileTable* table_for(const StatisticKind& method, const TablePair& tables) {
  switch (method.tag) {
    case Statistic::TA: return tables.ta;
    case Statistic::TB: return tables.tb;
    case Statistic::Student: return nullptr;
  }
  return nullptr;
}

inline void require_tables(const TablePair& tables, int n) {
  if (!tables.ta || !tables.tb) throw Error(ErrorCode::TableMissing, "study needs both T_A and T_B tables");
  for (const auto* t : {tables.ta, tables.tb}) {
    if (!t->find_row(n)) {
      throw Error(ErrorCode::TableMissing,
                  display_name(t->statistic()) + " table has no row for n = " + std::to_string(n));
    }
  }
  if (tables.ta->statistic().tag != Statistic::TA || tables.tb->statistic().tag != Statistic::TB) {
    throw Error(ErrorCode::TableMismatch, "tables are not (T_A, T_B)");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Outlier sensitivity of the interval

struct ContaminationStudy {
  std::vector<double> base_data = butterfat_data();
  /// The last observation is replaced by each delta in turn.
  std::vector<double> delta_grid = linear_grid(0.0, 2000.0, 201);
  /// 0.10 is the level at which the butterfat Student interval is
  /// [472.80, 542.20].
  double alpha = 0.10;
};

struct ContaminationRow {
  double delta;
  std::string method;
  double lower;
  double upper;
  double length;
};

inline std::vector<ContaminationRow> run_contamination(const ContaminationStudy& study, const TablePair& tables) {
  if (study.base_data.size() < 2) throw Error(ErrorCode::SampleTooSmall, "base data needs two observations");
  const int n = static_cast<int>(study.base_data.size());
  detail::require_tables(tables, n);
  std::vector<ContaminationRow> rows;
  rows.reserve(study.delta_grid.size() * 3);
  for (double delta : study.delta_grid) {
    auto data = study.base_data;
    data.back() = delta;
    const Sample s(std::move(data));
    for (const auto& method : study_methods(tables)) {
      const auto ci = confidence_interval(method, s, study.alpha, detail::table_for(method, tables));
      rows.push_back({delta, display_name(method), ci.lower, ci.upper, ci.length()});
    }
  }
  return rows;
}

inline void write_contamination_csv(std::ostream& out, const std::vector<ContaminationRow>& rows) {
  out << "delta,method,lower,upper,length\n";
  for (const auto& r : rows) {
    out << format_real(r.delta) << ',' << r.method << ',' << format_real(r.lower) << ',' << format_real(r.upper)
        << ',' << format_real(r.length) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Empirical power

struct Contamination {
  std::size_t index = 0;  ///< overwritten coordinate (the first)
  double value = 10.0;
};

struct PowerStudy {
  int n = 10;
  std::uint64_t reps = 10'000;
  std::vector<double> mu_grid = linear_grid(-2.0, 2.0, 81);
  std::optional<Contamination> contamination;
  double alpha = 0.05;
};

struct PowerRow {
  double mu;
  std::string method;
  double power;
};

/**
 * Rejection rates of the two-sided tests of H0: mu = 0 with critical values
 * from each statistic's own n-row. Cell i of the mu grid draws from its own
 * stream, so results do not depend on `threads`. A draw whose scale
 * estimate is zero counts as a non-rejection.
 */
inline std::vector<PowerRow> run_power(const PowerStudy& study, const TablePair& tables, std::uint64_t seed,
                                       unsigned threads = 1) {
  if (study.n < 2) throw Error(ErrorCode::SampleTooSmall, "power study needs n >= 2");
  if (study.reps == 0) throw Error(ErrorCode::InvalidConfig, "power study needs reps > 0");
  if (study.contamination && study.contamination->index >= static_cast<std::size_t>(study.n)) {
    throw Error(ErrorCode::InvalidConfig, "contaminated index outside the sample");
  }
  detail::check_alpha(study.alpha, "alpha");
  detail::require_tables(tables, study.n);

  const auto methods = study_methods(tables);
  std::array<double, 3> critical{};
  for (std::size_t m = 0; m < methods.size(); ++m) {
    critical[m] = methods[m].tag == Statistic::Student
                      ? student_t_quantile(1.0 - study.alpha / 2.0, static_cast<double>(study.n - 1))
                      : upper_quantile(*detail::table_for(methods[m], tables), study.n, study.alpha / 2.0).value;
  }

  const std::size_t cells = study.mu_grid.size();
  std::vector<std::array<std::uint64_t, 3>> rejections(cells);
  detail::parallel_for(cells, threads, [&](std::uint64_t cell) {
    const double mu = study.mu_grid[cell];
    RandomStream stream(stream_key(seed, StreamDomain::PowerStudy, static_cast<std::uint64_t>(study.n), cell));
    detail::StatisticScratch scratch;
    std::vector<double> sample(static_cast<std::size_t>(study.n));
    auto& counts = rejections[cell];
    counts = {0, 0, 0};
    for (std::uint64_t r = 0; r < study.reps; ++r) {
      for (double& x : sample) x = stream.normal(mu, 1.0);
      if (study.contamination) sample[study.contamination->index] = study.contamination->value;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto t = detail::try_evaluate(methods[m], sample, 0.0, scratch);
        if (t && std::abs(*t) > critical[m]) ++counts[m];
      }
    }
  });

  std::vector<PowerRow> rows;
  rows.reserve(cells * methods.size());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      rows.push_back({study.mu_grid[cell], display_name(methods[m]),
                      static_cast<double>(rejections[cell][m]) / static_cast<double>(study.reps)});
    }
  }
  return rows;
}

inline void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  out << "# critical values: per-statistic table quantiles at the study n\n";
  out << "mu,method,power\n";
  for (const auto& r : rows) out << format_real(r.mu) << ',' << r.method << ',' << format_real(r.power) << '\n';
}

// ---------------------------------------------------------------------------
// Convergence to the normal limit

struct ConvergenceRow {
  int n;
  double p;
  double quantile;
  double normal_quantile;
  double deviation;
};

/// q_p(n) - Phi^{-1}(p) for every tabled (n, p), including the centre p = 0.5.
inline std::vector<ConvergenceRow> run_convergence(const QuantileTable& table) {
  std::vector<ConvergenceRow> rows;
  for (const auto& [n, row] : table.rows()) {
    rows.push_back({n, 0.5, 0.0, 0.0, 0.0});
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double z = normal_quantile(table.grid()[k]);
      rows.push_back({n, table.grid()[k], row[k], z, row[k] - z});
    }
  }
  return rows;
}

inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "n,p,quantile,normal_quantile,deviation\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_real(r.p) << ',' << format_real(r.quantile) << ',' << format_real(r.normal_quantile)
        << ',' << format_real(r.deviation) << '\n';
  }
}

}  // namespace robust_t
