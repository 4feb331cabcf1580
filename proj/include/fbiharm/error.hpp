#pragma once

#include <stdexcept>
#include <string>

namespace fbiharm {

enum class ErrorCode {
  SingularEvaluation,
  NonFinite,
  NonPositiveWeight,
  NonPositiveCurvature,
  VanishingCurvature,
  NotArclength,
  StepTooLarge,
  DegenerateMetric,
  GridTooLarge,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularEvaluation: return "SingularEvaluation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NonPositiveCurvature: return "NonPositiveCurvature";
    case ErrorCode::VanishingCurvature: return "VanishingCurvature";
    case ErrorCode::NotArclength: return "NotArclength";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fbiharm
