#include "frc/error.hpp"

namespace frc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::NonMonotoneBreakpoints: return "NonMonotoneBreakpoints";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoGovernor: return "NoGovernor";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InconsistentBaseline: return "InconsistentBaseline";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ZeroBase: return "ZeroBase";
    case ErrorCode::ZeroInertia: return "ZeroInertia";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalDivergence: return "NumericalDivergence";
    case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string subject)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)) {}

}  // namespace frc
