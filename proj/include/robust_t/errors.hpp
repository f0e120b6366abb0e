#pragma once

#include <stdexcept>
#include <string>

namespace robust_t {

enum class ErrorCode {
  EmptySample,
  NonFiniteValue,
  SampleTooSmall,
  RankOutOfRange,
  ZeroScale,
  InvalidConfig,
  EmptyInput,
  InvalidProbability,
  SampleSizeBelowTable,
  RowMissing,
  ProbabilityOutsideGrid,
  GridTooCoarse,
  InsufficientGridPoints,
  TableMismatch,
  TableMissing,
  TableFormat,
  VersionMismatch,
  InvalidInput,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::SampleSizeBelowTable: return "SampleSizeBelowTable";
    case ErrorCode::RowMissing: return "RowMissing";
    case ErrorCode::ProbabilityOutsideGrid: return "ProbabilityOutsideGrid";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InsufficientGridPoints: return "InsufficientGridPoints";
    case ErrorCode::TableMismatch: return "TableMismatch";
    case ErrorCode::TableMissing: return "TableMissing";
    case ErrorCode::TableFormat: return "TableFormat";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can branch on the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robust_t
