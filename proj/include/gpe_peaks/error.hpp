#ifndef GPE_PEAKS_ERROR_HPP
#define GPE_PEAKS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gpe {

enum class ErrorCode {
  kInvalidArgument,
  kMemoryCap,
  kNonFinite,
  kExtrapolation,
  kNonDifferentiable,
  kNoGroundState,
  kGammaNonpositive,
  kNonpositiveB,
  kDiverged,
  kProjectionFailed,
  kNotConverged,
  kBallOutsideGrid,
  kDegenerateAxis,
  kDegenerate,
  kBandBelowFloor,
  kNonpositiveExcess,
  kParseError,
  kValidationError,
  kIo,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMemoryCap: return "memory_cap";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kExtrapolation: return "extrapolation";
    case ErrorCode::kNonDifferentiable: return "non_differentiable";
    case ErrorCode::kNoGroundState: return "no_ground_state";
    case ErrorCode::kGammaNonpositive: return "gamma_nonpositive";
    case ErrorCode::kNonpositiveB: return "nonpositive_B";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kProjectionFailed: return "projection_failed";
    case ErrorCode::kNotConverged: return "not_converged";
    case ErrorCode::kBallOutsideGrid: return "ball_outside_grid";
    case ErrorCode::kDegenerateAxis: return "degenerate_axis";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kBandBelowFloor: return "band_below_floor";
    case ErrorCode::kNonpositiveExcess: return "nonpositive_excess";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kValidationError: return "validation_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gpe

#endif  // GPE_PEAKS_ERROR_HPP
