#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvlab {

enum class ErrorCode {
  MissingExponent,
  NonintegrableWeight,
  DegenerateQuotient,
  UnknownFamily,
  IrregularLevel,
  BadEpsilon,
  WrongRegime,
  ShootDiverged,
  NoSolutionAtM,
  EigFailed,
  NotSemistable,
  InconclusiveBranch,
  InvalidArgument,
  MalformedInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingExponent: return "MISSING_EXPONENT";
    case ErrorCode::NonintegrableWeight: return "NONINTEGRABLE_WEIGHT";
    case ErrorCode::DegenerateQuotient: return "DEGENERATE_QUOTIENT";
    case ErrorCode::UnknownFamily: return "UNKNOWN_FAMILY";
    case ErrorCode::IrregularLevel: return "IRREGULAR_LEVEL";
    case ErrorCode::BadEpsilon: return "BAD_EPSILON";
    case ErrorCode::WrongRegime: return "WRONG_REGIME";
    case ErrorCode::ShootDiverged: return "SHOOT_DIVERGED";
    case ErrorCode::NoSolutionAtM: return "NO_SOLUTION_AT_M";
    case ErrorCode::EigFailed: return "EIG_FAILED";
    case ErrorCode::NotSemistable: return "NOT_SEMISTABLE";
    case ErrorCode::InconclusiveBranch: return "INCONCLUSIVE_BRANCH";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::MalformedInput: return "MALFORMED_INPUT";
  }
  return "UNKNOWN";
}

/// Library-wide exception. Carries a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace curvlab
