#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tube {

// Failure categories; the CLI maps them to process exit codes
// (InvalidInput / InvariantViolation -> 2, Numerical -> 1).
enum class ErrorKind { InvalidInput, Numerical, InvariantViolation };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), kind_(kind), code_(std::move(code)) {}
  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

#define TUBE_DEFINE_ERROR(NAME, KIND)                                   \
  class NAME : public Error {                                           \
   public:                                                              \
    explicit NAME(const std::string& what)                              \
        : Error(ErrorKind::KIND, #NAME, what) {}                        \
  };

// Input / geometry problems.
TUBE_DEFINE_ERROR(BadSpec, InvalidInput)
TUBE_DEFINE_ERROR(DegenerateBox, InvalidInput)
TUBE_DEFINE_ERROR(DisconnectedCell, InvalidInput)
TUBE_DEFINE_ERROR(ChannelMismatch, InvalidInput)
TUBE_DEFINE_ERROR(NonconformingSpacing, InvalidInput)
TUBE_DEFINE_ERROR(DisconnectedGrid, InvalidInput)
TUBE_DEFINE_ERROR(UnresolvedChannel, InvalidInput)
TUBE_DEFINE_ERROR(InvalidForNonzeroV, InvalidInput)

// Numerical failures.
TUBE_DEFINE_ERROR(NotConverged, Numerical)
TUBE_DEFINE_ERROR(SolverDiverged, Numerical)
TUBE_DEFINE_ERROR(ShiftSingular, Numerical)
TUBE_DEFINE_ERROR(IncompatibleRHS, Numerical)
TUBE_DEFINE_ERROR(ContinuationBroken, Numerical)
TUBE_DEFINE_ERROR(PoorFit, Numerical)
TUBE_DEFINE_ERROR(ReflectionStuck, Numerical)
TUBE_DEFINE_ERROR(BoundaryContaminated, Numerical)

// Violations of mathematical guarantees; these indicate a bug or an
// unusable configuration, not a tolerance issue.
TUBE_DEFINE_ERROR(NonPositiveNullvector, InvariantViolation)
TUBE_DEFINE_ERROR(NonNegativeRealPart, InvariantViolation)
TUBE_DEFINE_ERROR(RouteDisagreement, InvariantViolation)

#undef TUBE_DEFINE_ERROR

}  // namespace tube
