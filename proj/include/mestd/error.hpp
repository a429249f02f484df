#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mestd {

enum class ErrorCode {
  NonAscendingStates,
  ProbSumMismatch,
  NegativeProbability,
  InvalidParameter,
  NegativeGain,
  NonPositiveArgument,
  ToleranceNotReached,
  NoSignChange,
  NonPositiveDistortion,
  OutOfParetoRange,
  InvalidStateCount,
  MaxIterationsExceeded,
  GridTooCoarse,
  NotQuasiconcave,
  QuadratureFailure,
  AtDiscontinuity,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonAscendingStates: return "NonAscendingStates";
    case ErrorCode::ProbSumMismatch: return "ProbSumMismatch";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NegativeGain: return "NegativeGain";
    case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NonPositiveDistortion: return "NonPositiveDistortion";
    case ErrorCode::OutOfParetoRange: return "OutOfParetoRange";
    case ErrorCode::InvalidStateCount: return "InvalidStateCount";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotQuasiconcave: return "NotQuasiconcave";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::AtDiscontinuity: return "AtDiscontinuity";
  }
  return "Unknown";
}

/// Exception carrying a stable, machine-readable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mestd
