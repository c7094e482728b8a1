#include "dqhelmert/errors.hpp"

namespace dqhelmert {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotUnit: return "NotUnit";
    case ErrorCode::kGimbalSingularity: return "GimbalSingularity";
    case ErrorCode::kNonPositiveScale: return "NonPositiveScale";
    case ErrorCode::kZeroQuaternion: return "ZeroQuaternion";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::kInvalidProblem: return "InvalidProblem";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kSingularNormalMatrix: return "SingularNormalMatrix";
    case ErrorCode::kMaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::kRotationTooLarge: return "RotationTooLarge";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

bool IsInputError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kNonPositiveVariance:
    case ErrorCode::kInvalidProblem:
      return true;
    default:
      return false;
  }
}

}  // namespace dqhelmert
