#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpwg {

enum class ErrorCode {
  PERIOD_NOT_RECIPROCAL_INTEGER,
  GEOMETRY_VIOLATION,
  RESOLUTION_TOO_COARSE,
  PAIRING_MISMATCH,
  ZERO_VECTOR,
  NO_CONVERGENCE,
  DIMENSION_EXCEEDED,
  CAP_EXCEEDED,
  BRACKET_FAILURE,
  WINDOW_NOT_COVERED,
  PARSE_ERROR,
  VALIDATION_ERROR,
  IO_ERROR,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::PERIOD_NOT_RECIPROCAL_INTEGER: return "PERIOD_NOT_RECIPROCAL_INTEGER";
    case ErrorCode::GEOMETRY_VIOLATION: return "GEOMETRY_VIOLATION";
    case ErrorCode::RESOLUTION_TOO_COARSE: return "RESOLUTION_TOO_COARSE";
    case ErrorCode::PAIRING_MISMATCH: return "PAIRING_MISMATCH";
    case ErrorCode::ZERO_VECTOR: return "ZERO_VECTOR";
    case ErrorCode::NO_CONVERGENCE: return "NO_CONVERGENCE";
    case ErrorCode::DIMENSION_EXCEEDED: return "DIMENSION_EXCEEDED";
    case ErrorCode::CAP_EXCEEDED: return "CAP_EXCEEDED";
    case ErrorCode::BRACKET_FAILURE: return "BRACKET_FAILURE";
    case ErrorCode::WINDOW_NOT_COVERED: return "WINDOW_NOT_COVERED";
    case ErrorCode::PARSE_ERROR: return "PARSE_ERROR";
    case ErrorCode::VALIDATION_ERROR: return "VALIDATION_ERROR";
    case ErrorCode::IO_ERROR: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Exception carrying a machine-checkable error code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpwg
