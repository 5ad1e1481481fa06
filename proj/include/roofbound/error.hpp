#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roofbound {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kInvalidState,
  kWrongQubitCount,
  kDegenerateInput,
  kSpanInZeroLocus,
  kNoZeroInRange,
  kInsufficientZeroStates,
  kSupportViolation,
  kPiAbsorbsRho,
  kRankNotReduced,
  kNotInRange,
  kDescentFailure,
  kAllRestartsFailed,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kWrongQubitCount: return "wrong qubit count";
    case ErrorCode::kDegenerateInput: return "degenerate input";
    case ErrorCode::kSpanInZeroLocus: return "span lies in zero locus";
    case ErrorCode::kNoZeroInRange: return "no zero-E state in range";
    case ErrorCode::kInsufficientZeroStates: return "insufficient distinct zero-E states";
    case ErrorCode::kSupportViolation: return "support violation";
    case ErrorCode::kPiAbsorbsRho: return "pi absorbs rho";
    case ErrorCode::kRankNotReduced: return "rank not reduced";
    case ErrorCode::kNotInRange: return "state not in range";
    case ErrorCode::kDescentFailure: return "descent failure";
    case ErrorCode::kAllRestartsFailed: return "all restarts failed";
    case ErrorCode::kInternal: return "internal consistency error";
  }
  return "unknown";
}

}  // namespace roofbound
