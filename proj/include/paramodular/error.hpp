#pragma once

#include <stdexcept>
#include <string>

namespace paramodular {

enum class ErrorCode {
  DimensionMismatch,
  SingularMatrix,
  InvalidLevel,
  DegenerateForm,
  NotPrimitive,
  NotIsotropic,
  NonSquareFreeLevel,
  InvalidRank,
  InadmissibleD,
  NotElementary,
  NotIsometric,
  InvalidInvariant,
  ScaleLimit,
  IncompatibleLocals,
  NotMaximal,
  NotContainedInRadical,
  IntegralityViolation,
  NotStabilizing,
  NotInHalfSpace,
  NotPositiveDefinite,
  NotEven,
  TailTooLarge,
  NotSupported,
  EmptyGenus,
  NotApplicable,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace paramodular
