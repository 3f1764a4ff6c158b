#pragma once

#include <stdexcept>
#include <string>

namespace mopchains {

/** @brief Failure categories raised by the library. */
enum class ErrorCode {
  InvalidParams,
  TruncationTooLarge,
  UnsupportedFamily,
  NonTerminating,
  PoleInLower,
  NoPBF,
  BracketFailure,
  NotAnEigenvalue,
  NotNonnegative,
  DegenerateSteadyState,
  ZeroPivot,
  NonPositivePivot,
  PeriodMismatch,
  BiorthogonalityFailure,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TruncationTooLarge: return "TruncationTooLarge";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::NonTerminating: return "NonTerminating";
    case ErrorCode::PoleInLower: return "PoleInLower";
    case ErrorCode::NoPBF: return "NoPBF";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::NotNonnegative: return "NotNonnegative";
    case ErrorCode::DegenerateSteadyState: return "DegenerateSteadyState";
    case ErrorCode::ZeroPivot: return "ZeroPivot";
    case ErrorCode::NonPositivePivot: return "NonPositivePivot";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::BiorthogonalityFailure: return "BiorthogonalityFailure";
  }
  return "Unknown";
}

/** @brief Exception carrying an ErrorCode plus a human-readable detail. */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /** @brief True for errors caused by bad input rather than numerics. */
  bool is_usage() const noexcept {
    return code_ == ErrorCode::InvalidParams || code_ == ErrorCode::TruncationTooLarge ||
           code_ == ErrorCode::UnsupportedFamily;
  }

 private:
  ErrorCode code_;
};

}  // namespace mopchains
