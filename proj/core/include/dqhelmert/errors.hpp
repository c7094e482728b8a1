#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dqhelmert {

enum class ErrorCode {
  kNotUnit,
  kGimbalSingularity,
  kNonPositiveScale,
  kZeroQuaternion,
  kSingular,
  kDimensionMismatch,
  kNonPositiveVariance,
  kInvalidProblem,
  kDegenerateGeometry,
  kSingularNormalMatrix,
  kMaxIterationsExceeded,
  kRotationTooLarge,
  kParseError,
};

std::string_view ToString(ErrorCode code);

// True for errors caused by malformed input rather than by the numerics.
bool IsInputError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dqhelmert
