#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsp {

enum class ErrorKind {
  InvalidSpec,
  UnsupportedBoundary,
  DegenerateMap,
  OutOfCollar,
  ZeroDenominator,
  Incompatible,
  NoConvergence,
  DegenerateState,
  NewtonDiverged,
  NonpositiveDensity,
  PreconditionViolated,
  CFLViolation,
  ResolutionTooLow,
  ChartCoverage,
  InsufficientData,
  NonpositiveEnergy,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code and callers can match on it in tests.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace nsp
