#pragma once

// Quantile table files.
//
// Line 1 is a one-line JSON header:
//   {"format":"robust-t-quantile-table","generator_version":"1",
//    "statistic":"tb","convention":"strict","N":1000000,"seed":...,
//    "grid":[0.6,...],"zero_scale_redraws":0}
// followed by a CSV payload: a header row `n,p1,p2,...` and one row per n.
// Every real is written as its shortest round-trip decimal, so a file read
// back reproduces the table bit for bit.

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "robust_t/errors.hpp"
#include "robust_t/quantile_table.hpp"

namespace robust_t {

inline constexpr const char* kTableFormatName = "robust-t-quantile-table";

inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::TableFormat, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline int parse_int(std::string_view text) {
  while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::TableFormat, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

inline void write_table(std::ostream& out, const QuantileTable& t) {
  nlohmann::ordered_json header;
  header["format"] = kTableFormatName;
  header["generator_version"] = t.metadata().generator_version;
  header["statistic"] = to_string(t.statistic().tag);
  header["convention"] = to_string(t.statistic().convention);
  header["N"] = t.metadata().replications;
  header["seed"] = t.metadata().seed;
  header["grid"] = t.grid();
  header["zero_scale_redraws"] = t.metadata().zero_scale_redraws;
  out << header.dump() << '\n';

  out << 'n';
  for (double p : t.grid()) out << ',' << format_real(p);
  out << '\n';
  for (const auto& [n, row] : t.rows()) {
    out << n;
    for (double q : row) out << ',' << format_real(q);
    out << '\n';
  }
}

inline QuantileTable read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::TableFormat, "empty table file");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::TableFormat, std::string("bad JSON header: ") + e.what());
  }

  StatisticKind kind;
  std::vector<double> grid;
  TableMetadata meta;
  try {
    if (header.at("format").get<std::string>() != kTableFormatName) {
      throw Error(ErrorCode::TableFormat, "not a quantile table file");
    }
    meta.generator_version = header.at("generator_version").get<std::string>();
    if (meta.generator_version != kGeneratorVersion) {
      throw Error(ErrorCode::VersionMismatch, "table generator_version '" + meta.generator_version +
                                                  "' does not match reader version '" + kGeneratorVersion + "'");
    }
    const auto stat = parse_statistic(header.at("statistic").get<std::string>());
    if (!stat) throw Error(ErrorCode::TableFormat, "unknown statistic in header");
    kind.tag = *stat;
    const auto convention = header.at("convention").get<std::string>();
    if (convention == "strict") {
      kind.convention = PairIndexConvention::Strict;
    } else if (convention == "inclusive") {
      kind.convention = PairIndexConvention::Inclusive;
    } else {
      throw Error(ErrorCode::TableFormat, "unknown convention '" + convention + "'");
    }
    meta.replications = header.at("N").get<std::uint64_t>();
    meta.seed = header.at("seed").get<std::uint64_t>();
    meta.zero_scale_redraws = header.value("zero_scale_redraws", std::uint64_t{0});
    grid = header.at("grid").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::TableFormat, std::string("bad header field: ") + e.what());
  }

  if (!std::getline(in, line)) throw Error(ErrorCode::TableFormat, "missing CSV header row");
  const auto columns = detail::split_csv_line(line);
  if (columns.size() != grid.size() + 1 || columns[0] != "n") {
    throw Error(ErrorCode::TableFormat, "CSV header does not match the grid");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (parse_real(columns[k + 1]) != grid[k]) {
      throw Error(ErrorCode::TableFormat, "CSV header probability differs from JSON grid");
    }
  }

  QuantileTable::Rows rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != grid.size() + 1) throw Error(ErrorCode::TableFormat, "row has wrong field count");
    std::vector<double> row;
    row.reserve(grid.size());
    for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(parse_real(fields[k]));
    const int n = detail::parse_int(fields[0]);
    if (!rows.emplace(n, std::move(row)).second) throw Error(ErrorCode::TableFormat, "duplicate row n");
  }
  return QuantileTable(kind, std::move(grid), std::move(rows), std::move(meta));
}

inline void save_table(const std::string& path, const QuantileTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_table(out, t);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

inline QuantileTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::TableMissing, "cannot open table '" + path + "'");
  return read_table(in);
}

/**
 * Reads reference quantiles laid out as typeset rows:
 *
 *     10&& 0.266 &0.402 & ... &4.369 \\
 *
 * i.e. n followed by the twelve publication-grid quantiles, separated by
 * '&' and/or whitespace. Lines that do not start with a digit are ignored.
 */
inline QuantileTable parse_published_table(std::istream& in, StatisticKind kind,
                                           std::uint64_t replications = 100'000'000) {
  const auto grid = publication_grid();
  QuantileTable::Rows rows;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || !std::isdigit(static_cast<unsigned char>(line[start]))) continue;
    for (char& c : line) {
      if (c == '&' || c == '\\' || c == '\r') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.size() != grid.size() + 1) {
      throw Error(ErrorCode::TableFormat, "reference row needs n and " + std::to_string(grid.size()) + " quantiles");
    }
    std::vector<double> row;
    for (std::size_t k = 1; k < tokens.size(); ++k) row.push_back(parse_real(tokens[k]));
    rows[detail::parse_int(tokens[0])] = std::move(row);
  }
  TableMetadata meta;
  meta.replications = replications;
  meta.generator_version = "reference";
  return QuantileTable(kind, grid, std::move(rows), std::move(meta));
}

inline QuantileTable load_published_table(const std::string& path, StatisticKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::TableMissing, "cannot open reference table '" + path + "'");
  return parse_published_table(in, kind);
}

}  // namespace robust_t
