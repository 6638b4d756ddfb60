#pragma once

#include <stdexcept>
#include <string>

namespace regen {

enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kNoSampler,
  kNumeric,
  kSingularDispersion,
  kImpossibleTransition,
  kMinorizationViolation,
  kClippingViolation,
  kDegenerateMarginal,
  kInvalidCap,
  kNoBlocks,
  kTooFewBlocks,
  kInsufficientReps,
  kInvalidCovariance,
  kDimensionMismatch,
  kDegenerateStudentizer,
  kGridMismatch,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. The code lets the CLI map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kNoSampler: return "no sampler";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kSingularDispersion: return "singular dispersion";
    case ErrorCode::kImpossibleTransition: return "impossible transition";
    case ErrorCode::kMinorizationViolation: return "minorization violation";
    case ErrorCode::kClippingViolation: return "clipping violation";
    case ErrorCode::kDegenerateMarginal: return "degenerate marginal";
    case ErrorCode::kInvalidCap: return "invalid cap";
    case ErrorCode::kNoBlocks: return "no blocks";
    case ErrorCode::kTooFewBlocks: return "too few blocks";
    case ErrorCode::kInsufficientReps: return "insufficient reps";
    case ErrorCode::kInvalidCovariance: return "invalid covariance";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kDegenerateStudentizer: return "degenerate studentizer";
    case ErrorCode::kGridMismatch: return "grid mismatch";
  }
  return "error";
}

}  // namespace regen
