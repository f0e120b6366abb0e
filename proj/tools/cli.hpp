#pragma once

// The robust-t command line. run_cli is the whole program; main() only wires
// it to the process streams so tests can drive it in-process.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "robust_t/robust_t.hpp"

#ifndef ROBUST_T_DEFAULT_TABLE_DIR
#define ROBUST_T_DEFAULT_TABLE_DIR "data/tables"
#endif

namespace robust_t::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

inline constexpr const char* kTableDirEnv = "ROBUST_T_TABLE_DIR";

/// Directory searched for ta_*.table / tb_*.table when --table is not given.
inline std::string table_directory() {
  if (const char* env = std::getenv(kTableDirEnv); env && *env) return env;
  return ROBUST_T_DEFAULT_TABLE_DIR;
}

inline std::string default_table_path(Statistic s, const std::string& grid_name) {
  return (std::filesystem::path(table_directory()) / (to_string(s) + "_" + grid_name + ".table")).string();
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroScale: return kExitNumeric;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidProbability: return kExitUsage;
    default: return kExitData;
  }
}

namespace detail {

// Human-readable fixed-point number.
inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Sample read_input(const std::string& path) {
  if (path == "-") return read_sample_csv(std::cin);
  return read_sample_csv(path);
}

// Tables given with --table, keyed by the statistic recorded in their header.
// Missing statistics fall back to the table directory.
class TableSet {
 public:
  TableSet(const std::vector<std::string>& paths, std::vector<std::string> preferred_grids)
      : preferred_(std::move(preferred_grids)) {
    for (const auto& p : paths) {
      auto t = std::make_shared<QuantileTable>(load_table(p));
      tables_[t->statistic().tag] = std::move(t);
    }
  }

  const QuantileTable& get(Statistic s) {
    if (auto it = tables_.find(s); it != tables_.end()) return *it->second;
    std::string tried;
    for (const auto& grid : preferred_) {
      const auto path = default_table_path(s, grid);
      if (std::filesystem::exists(path)) {
        auto t = std::make_shared<QuantileTable>(load_table(path));
        if (t->statistic().tag != s) throw Error(ErrorCode::TableMismatch, path + " holds the wrong statistic");
        return *(tables_[s] = std::move(t));
      }
      tried += (tried.empty() ? "" : ", ") + path;
    }
    throw Error(ErrorCode::TableMissing, "no " + to_string(s) + " table given and none found (tried " + tried +
                                             "); pass --table or set " + kTableDirEnv);
  }

 private:
  std::vector<std::string> preferred_;
  std::map<Statistic, std::shared_ptr<QuantileTable>> tables_;
};

inline std::vector<Statistic> methods_for(const std::string& method) {
  if (method == "all") return {Statistic::Student, Statistic::TA, Statistic::TB};
  return {*parse_statistic(method)};
}

inline StatisticKind kind_for(Statistic s, TableSet& tables) {
  switch (s) {
    case Statistic::Student: return StatisticKind::student();
    case Statistic::TA: return StatisticKind::ta();
    case Statistic::TB: return tables.get(Statistic::TB).statistic();
  }
  return StatisticKind::student();
}

inline const QuantileTable* table_ptr(Statistic s, TableSet& tables) {
  return s == Statistic::Student ? nullptr : &tables.get(s);
}

inline Alternative parse_alternative(const std::string& s) {
  if (s == "greater") return Alternative::Greater;
  if (s == "less") return Alternative::Less;
  return Alternative::TwoSided;
}

inline std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return file;
}

// ---------------------------------------------------------------------------

struct GenTableOptions {
  std::string stat = "ta";
  int n_min = 4;
  int n_max = 50;
  std::uint64_t reps = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::string grid = "publication";
  std::string shamos = "strict";
  unsigned threads = 0;
  std::string out;
  std::string dense_out;
};

inline int gen_table(const GenTableOptions& o, std::ostream& out, std::ostream& err) {
  if (o.reps < kMinReplications) {
    throw UsageError("--reps must be at least " + std::to_string(kMinReplications));
  }
  if (o.n_min > o.n_max) throw UsageError("--n-min exceeds --n-max");
  if (o.grid == "dense" && !o.dense_out.empty()) {
    throw UsageError("--dense-out needs --grid publication");
  }

  SimulationConfig cfg;
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.statistic = o.stat == "ta" ? StatisticKind::ta()
                                 : StatisticKind::tb(o.shamos == "inclusive" ? PairIndexConvention::Inclusive
                                                                             : PairIndexConvention::Strict);
  for (int n = o.n_min; n <= o.n_max; ++n) cfg.sample_sizes.push_back(n);
  cfg.probability_grid = o.grid == "dense" ? dense_grid() : publication_grid();

  std::vector<std::vector<double>> grids{cfg.probability_grid};
  if (!o.dense_out.empty()) grids.push_back(dense_grid());

  const auto tables = generate_tables(cfg, grids, [&](int n, std::uint64_t redraws) {
    err << "n=" << n << " done";
    if (redraws) err << " (" << redraws << " zero-scale redraws)";
    err << '\n';
  });

  // Worst standard error per row over the grid points that have two neighbours.
  const auto& main = tables.front();
  for (const auto& [n, row] : main.rows()) {
    double worst = 0.0;
    double worst_p = 0.0;
    for (double p : main.grid()) {
      try {
        const auto acc = quantile_accuracy(p, main.metadata().replications, main.grid(), row);
        if (acc.stderr_estimate > worst) {
          worst = acc.stderr_estimate;
          worst_p = p;
        }
      } catch (const Error&) {
      }
    }
    err << "n=" << n << " max stderr " << fixed(worst, 5) << " (p=" << format_real(worst_p) << ")\n";
  }

  std::ofstream file;
  write_table(open_output(o.out, file, out), main);
  if (!o.dense_out.empty()) save_table(o.dense_out, tables.back());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TestOptions {
  std::string input;
  double mu0 = 0.0;
  double alpha = 0.05;
  std::string method = "all";
  std::vector<std::string> tables;
  std::string alternative = "two-sided";
  bool json = false;
};

inline int test(const TestOptions& o, std::ostream& out) {
  const Sample s = read_input(o.input);
  TableSet tables(o.tables, {"dense", "publication"});
  const auto alt = parse_alternative(o.alternative);
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (Statistic m : methods_for(o.method)) {
    const auto kind = kind_for(m, tables);
    const auto r = test_mu(s, o.mu0, o.alpha, kind, table_ptr(m, tables), alt);
    if (o.json) {
      nlohmann::ordered_json j;
      j["method"] = display_name(kind);
      if (m == Statistic::TB) j["convention"] = to_string(kind.convention);
      j["n"] = s.size();
      j["mu0"] = r.mu0;
      j["alpha"] = r.alpha;
      j["alternative"] = to_string(r.alternative);
      j["statistic"] = r.statistic_value;
      j["critical_value"] = r.critical_value;
      j["p_value"] = r.p_value ? nlohmann::ordered_json(*r.p_value) : nlohmann::ordered_json(nullptr);
      j["reject"] = r.reject;
      j["normal_fallback"] = r.normal_fallback;
      records.push_back(std::move(j));
    } else {
      out << display_name(kind) << ": statistic " << fixed(r.statistic_value, 3) << ", critical "
          << fixed(r.critical_value, 3) << ", p-value "
          << (r.p_value ? fixed(*r.p_value, 4) : std::string("n/a (coarse table)")) << " -> "
          << (r.reject ? "reject" : "do not reject") << " H0: mu = " << format_real(r.mu0) << " at alpha "
          << format_real(r.alpha) << " (" << to_string(r.alternative) << ")";
      if (r.normal_fallback) out << " [normal approximation: n above table]";
      out << '\n';
    }
  }
  if (o.json) out << records.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CiOptions {
  std::string input;
  double alpha = 0.05;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::string method = "all";
  std::vector<std::string> tables;
  bool json = false;
};

inline int ci(const CiOptions& o, std::ostream& out) {
  if (o.alpha1.has_value() != o.alpha2.has_value()) throw UsageError("--alpha1 and --alpha2 go together");
  const Sample s = read_input(o.input);
  TableSet tables(o.tables, {"publication", "dense"});
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (Statistic m : methods_for(o.method)) {
    const auto kind = kind_for(m, tables);
    ConfidenceInterval interval{};
    if (o.alpha1) {
      if (m == Statistic::Student) {
        interval = ci_student(s, *o.alpha1, *o.alpha2);
      } else {
        interval = robust_t::detail::table_interval(kind, s, *o.alpha1, *o.alpha2, *table_ptr(m, tables));
      }
    } else {
      interval = confidence_interval(kind, s, o.alpha, table_ptr(m, tables));
    }
    const double level = 1.0 - interval.alpha1 - interval.alpha2;
    if (o.json) {
      nlohmann::ordered_json j;
      j["method"] = display_name(kind);
      if (m == Statistic::TB) j["convention"] = to_string(kind.convention);
      j["n"] = s.size();
      j["alpha1"] = interval.alpha1;
      j["alpha2"] = interval.alpha2;
      j["lower"] = interval.lower;
      j["upper"] = interval.upper;
      j["length"] = interval.length();
      records.push_back(std::move(j));
    } else {
      out << display_name(kind) << ' ' << fixed(100.0 * level, 2) << "% interval: [" << fixed(interval.lower, 2)
          << ", " << fixed(interval.upper, 2) << "]  length " << fixed(interval.length(), 2) << '\n';
    }
  }
  if (o.json) out << records.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LookupOptions {
  std::string stat = "ta";
  int n = 10;
  double p = 0.975;
  std::vector<std::string> tables;
  bool json = false;
};

inline int lookup(const LookupOptions& o, std::ostream& out) {
  TableSet tables(o.tables, {"publication", "dense"});
  const auto& t = tables.get(*parse_statistic(o.stat));
  const auto q = lookup_quantile(t, o.n, o.p);
  if (o.json) {
    nlohmann::ordered_json j{{"statistic", display_name(t.statistic())},
                             {"n", o.n},
                             {"p", o.p},
                             {"quantile", q.value},
                             {"normal_fallback", q.normal_fallback}};
    out << j.dump(2) << '\n';
  } else {
    out << "q_" << format_real(o.p) << "(n=" << o.n << ") = " << format_real(q.value);
    if (q.normal_fallback) out << "  [normal approximation: n above table]";
    out << '\n';
  }
  return kExitOk;
}

struct PValueOptions {
  std::string stat = "ta";
  int n = 10;
  double t = 0.0;
  std::string alternative = "two-sided";
  std::vector<std::string> tables;
  bool json = false;
};

inline int pvalue(const PValueOptions& o, std::ostream& out) {
  TableSet tables(o.tables, {"dense"});
  const auto& t = tables.get(*parse_statistic(o.stat));
  const double p = p_value(t, o.n, o.t, parse_alternative(o.alternative));
  if (o.json) {
    nlohmann::ordered_json j{{"statistic", display_name(t.statistic())},
                             {"n", o.n},
                             {"t", o.t},
                             {"alternative", o.alternative},
                             {"p_value", p},
                             {"normal_fallback", o.n > t.max_n()}};
    out << j.dump(2) << '\n';
  } else {
    out << "p-value " << format_real(p) << '\n';
  }
  return kExitOk;
}

struct InspectOptions {
  std::string table;
};

inline int inspect(const InspectOptions& o, std::ostream& out) {
  const auto t = load_table(o.table);
  out << "statistic: " << display_name(t.statistic());
  if (t.statistic().tag == Statistic::TB) out << " (" << to_string(t.statistic().convention) << " pairs)";
  out << "\nreplications: " << t.metadata().replications << "\nseed: " << t.metadata().seed
      << "\ngenerator version: " << t.metadata().generator_version
      << "\nzero-scale redraws: " << t.metadata().zero_scale_redraws << "\nn: " << t.min_n() << ".." << t.max_n()
      << " (" << t.rows().size() << " rows)\ngrid: " << t.grid().size() << " points, " << format_real(t.grid().front())
      << ".." << format_real(t.grid().back()) << (t.supports_p_values() ? ", p-values supported" : "") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExperimentOptions {
  std::string kind;
  std::vector<std::string> tables;
  std::string out;
  bool contaminate = false;
  double contamination_value = 10.0;
  std::uint64_t reps = 10'000;
  int n = 10;
  double alpha = -1.0;  // kind-specific default
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

inline int experiment(const ExperimentOptions& o, std::ostream& out) {
  if (o.reps == 0) throw UsageError("--reps must be positive");
  std::ofstream file;
  std::ostream& dest = open_output(o.out, file, out);
  TableSet tables(o.tables, {"publication", "dense"});

  if (o.kind == "convergence") {
    // Single table: the first --table, else the T_B default.
    if (o.tables.empty()) {
      write_convergence_csv(dest, run_convergence(tables.get(Statistic::TB)));
    } else {
      write_convergence_csv(dest, run_convergence(load_table(o.tables.front())));
    }
    return kExitOk;
  }

  const TablePair pair{&tables.get(Statistic::TA), &tables.get(Statistic::TB)};
  if (o.kind == "contamination") {
    ContaminationStudy study;
    if (o.alpha > 0) study.alpha = o.alpha;
    dest << "# alpha " << format_real(study.alpha) << "; last observation replaced by delta\n";
    write_contamination_csv(dest, run_contamination(study, pair));
  } else {
    PowerStudy study;
    study.n = o.n;
    study.reps = o.reps;
    if (o.alpha > 0) study.alpha = o.alpha;
    if (o.contaminate) study.contamination = Contamination{0, o.contamination_value};
    dest << "# n " << study.n << ", reps " << study.reps << ", alpha " << format_real(study.alpha) << ", seed "
         << o.seed;
    if (study.contamination) dest << ", x1 = " << format_real(study.contamination->value);
    dest << '\n';
    write_power_csv(dest, run_power(study, pair, o.seed, o.threads));
  }
  return kExitOk;
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-sample robust t statistics: tables, tests, intervals and studies", "robust-t"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("robust-t table format ") + kGeneratorVersion);

  const std::vector<std::string> stat_choices{"ta", "tb"};
  const std::vector<std::string> method_choices{"ta", "tb", "student", "all"};
  const std::vector<std::string> alt_choices{"two-sided", "greater", "less"};

  detail::GenTableOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-table", "Simulate a quantile table");
  gen_cmd->add_option("--stat", gen.stat, "Statistic")->check(CLI::IsMember(stat_choices))->capture_default_str();
  gen_cmd->add_option("--n-min", gen.n_min, "Smallest sample size")->check(CLI::Range(4, 65535))->capture_default_str();
  gen_cmd->add_option("--n-max", gen.n_max, "Largest sample size")->check(CLI::Range(4, 65535))->capture_default_str();
  gen_cmd->add_option("--reps", gen.reps, "Replications per n")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--grid", gen.grid, "Probability grid")
      ->check(CLI::IsMember({"publication", "dense"}))
      ->capture_default_str();
  gen_cmd->add_option("--shamos", gen.shamos, "Pair-index convention for T_B")
      ->check(CLI::IsMember({"strict", "inclusive"}))
      ->capture_default_str();
  gen_cmd->add_option("--threads", gen.threads, "Worker threads (0 = all cores); output does not depend on it")
      ->capture_default_str();
  gen_cmd->add_option("--out,-o", gen.out, "Output table file (default stdout)");
  gen_cmd->add_option("--dense-out", gen.dense_out, "Also write a dense-grid table from the same draws");

  detail::TestOptions tst;
  auto* test_cmd = app.add_subcommand("test", "Test H0: mu = mu0");
  test_cmd->add_option("input", tst.input, "Sample CSV ('-' for stdin)")->required();
  test_cmd->add_option("--mu0", tst.mu0, "Hypothesized location")->required();
  test_cmd->add_option("--alpha", tst.alpha, "Level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  test_cmd->add_option("--method", tst.method, "Method")->check(CLI::IsMember(method_choices))->capture_default_str();
  test_cmd->add_option("--table", tst.tables, "Quantile table file(s)");
  test_cmd->add_option("--alternative", tst.alternative, "Alternative")
      ->check(CLI::IsMember(alt_choices))
      ->capture_default_str();
  test_cmd->add_flag("--json", tst.json, "Machine-readable output");

  detail::CiOptions cio;
  auto* ci_cmd = app.add_subcommand("ci", "Confidence intervals for mu");
  ci_cmd->add_option("input", cio.input, "Sample CSV ('-' for stdin)")->required();
  ci_cmd->add_option("--alpha", cio.alpha, "1 - confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  ci_cmd->add_option("--alpha1", cio.alpha1, "Tail probability above the interval");
  ci_cmd->add_option("--alpha2", cio.alpha2, "Tail probability below the interval");
  ci_cmd->add_option("--method", cio.method, "Method")->check(CLI::IsMember(method_choices))->capture_default_str();
  ci_cmd->add_option("--table", cio.tables, "Quantile table file(s)");
  ci_cmd->add_flag("--json", cio.json, "Machine-readable output");

  detail::LookupOptions lk;
  auto* lookup_cmd = app.add_subcommand("lookup", "Quantile q_p at sample size n");
  lookup_cmd->add_option("--stat", lk.stat, "Statistic")->check(CLI::IsMember(stat_choices))->capture_default_str();
  lookup_cmd->add_option("--n", lk.n, "Sample size")->required();
  lookup_cmd->add_option("--p", lk.p, "Probability")->required();
  lookup_cmd->add_option("--table", lk.tables, "Quantile table file");
  lookup_cmd->add_flag("--json", lk.json, "Machine-readable output");

  detail::PValueOptions pv;
  auto* pvalue_cmd = app.add_subcommand("pvalue", "p-value of an observed statistic (dense table)");
  pvalue_cmd->add_option("--stat", pv.stat, "Statistic")->check(CLI::IsMember(stat_choices))->capture_default_str();
  pvalue_cmd->add_option("--n", pv.n, "Sample size")->required();
  pvalue_cmd->add_option("--t", pv.t, "Observed statistic")->required();
  pvalue_cmd->add_option("--alternative", pv.alternative, "Alternative")
      ->check(CLI::IsMember(alt_choices))
      ->capture_default_str();
  pvalue_cmd->add_option("--table", pv.tables, "Dense quantile table file");
  pvalue_cmd->add_flag("--json", pv.json, "Machine-readable output");

  detail::InspectOptions ins;
  auto* inspect_cmd = app.add_subcommand("inspect", "Show a table's metadata");
  inspect_cmd->add_option("table", ins.table, "Table file")->required();

  detail::ExperimentOptions ex;
  auto* exp_cmd = app.add_subcommand("experiment", "Outlier-sensitivity, power and convergence studies");
  exp_cmd->add_option("--kind", ex.kind, "Study")
      ->check(CLI::IsMember({"contamination", "power", "convergence"}))
      ->required();
  exp_cmd->add_option("--table", ex.tables, "Quantile table file(s)");
  exp_cmd->add_option("--out,-o", ex.out, "Output CSV (default stdout)");
  exp_cmd->add_flag("--contaminate", ex.contaminate, "Power study: overwrite x1 with an outlier");
  exp_cmd->add_option("--outlier", ex.contamination_value, "Outlier value for --contaminate")->capture_default_str();
  exp_cmd->add_option("--reps", ex.reps, "Power study replications per mu")->capture_default_str();
  exp_cmd->add_option("--n", ex.n, "Power study sample size")->capture_default_str();
  exp_cmd->add_option("--alpha", ex.alpha, "Level (default 0.10 contamination, 0.05 power)");
  exp_cmd->add_option("--seed", ex.seed, "Random seed")->capture_default_str();
  exp_cmd->add_option("--threads", ex.threads, "Worker threads (0 = all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return detail::gen_table(gen, out, err);
    if (*test_cmd) return detail::test(tst, out);
    if (*ci_cmd) return detail::ci(cio, out);
    if (*lookup_cmd) return detail::lookup(lk, out);
    if (*pvalue_cmd) return detail::pvalue(pv, out);
    if (*inspect_cmd) return detail::inspect(ins, out);
    if (*exp_cmd) return detail::experiment(ex, out);
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace robust_t::cli
