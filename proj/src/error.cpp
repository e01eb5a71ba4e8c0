#include "tvpbreak/error.hpp"

namespace tvpbreak {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NoMatchingLambda: return "NoMatchingLambda";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::SingularBetaGram: return "SingularBetaGram";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotonicDates: return "NonMonotonicDates";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

// 1 is reserved for unexpected failures; 2 for usage errors reported by the flag parser.
int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return 2;
    case ErrorCode::IoError: return 3;
    case ErrorCode::ParseError: return 4;
    case ErrorCode::NonMonotonicDates: return 5;
    case ErrorCode::NonFiniteEntry: return 6;
    case ErrorCode::DimensionMismatch: return 7;
    case ErrorCode::EmptyPanel: return 8;
    case ErrorCode::SeriesTooShort: return 9;
    case ErrorCode::DegenerateDesign: return 10;
    case ErrorCode::RankTooLarge: return 11;
    case ErrorCode::SingularBetaGram: return 12;
    case ErrorCode::NoMatchingLambda: return 13;
    case ErrorCode::NotConverged: return 14;
    case ErrorCode::InvalidSchedule: return 15;
    case ErrorCode::UnstableSystem: return 16;
    case ErrorCode::IndexOutOfRange: return 17;
  }
  return 1;
}

}  // namespace tvpbreak
