#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frc {

enum class ErrorCode {
  EmptyCurve,
  NonMonotoneBreakpoints,
  NonFiniteValue,
  NotMonotone,
  TargetUnreachable,
  ParseError,
  ValidationError,
  UnknownUnit,
  InvalidSpec,
  NoGovernor,
  InvalidParams,
  InconsistentBaseline,
  DivisionByZero,
  ZeroBase,
  ZeroInertia,
  DimensionMismatch,
  NumericalDivergence,
  TrajectoryTooShort,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `subject()` carries the offending
/// JSON path, unit id, or similar locator when one exists.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace frc
