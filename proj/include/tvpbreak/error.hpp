#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvpbreak {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteEntry,
  EmptyPanel,
  DegenerateDesign,
  IndexOutOfRange,
  NotConverged,
  NoMatchingLambda,
  SeriesTooShort,
  RankTooLarge,
  SingularBetaGram,
  InvalidSchedule,
  UnstableSystem,
  ParseError,
  NonMonotonicDates,
  IoError,
  InvalidConfig,
};

/// Stable identifier used in machine-readable error output, e.g. "DimensionMismatch".
std::string_view error_name(ErrorCode code) noexcept;

/// Process exit status the CLI reports for a given error.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tvpbreak
