#pragma once

#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/sample.hpp"
#include "robust_t/table_io.hpp"

namespace robust_t {

/**
 * Reads observations from single-column CSV text.
 *
 * Blank lines and lines starting with '#' are skipped; text after '#' is a
 * comment. The first data line may be a header (it is skipped if it does
 * not parse as a number). Only the first column of each row is used.
 */
inline Sample read_sample_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  bool first_data_line = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (const auto comma = line.find(','); comma != std::string::npos) line.erase(comma);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double v;
    try {
      v = parse_real(line);
    } catch (const Error&) {
      if (first_data_line) {
        first_data_line = false;
        continue;
      }
      throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": not a number");
    }
    first_data_line = false;
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(line_no) + ": value is not finite");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::EmptySample, "input has no observations");
  return Sample(std::move(values));
}

inline Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open input '" + path + "'");
  return read_sample_csv(in);
}

}  // namespace robust_t
