#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modesift {

enum class ErrorCode {
  InvalidArgument,
  MalformedHeader,
  MalformedData,
  DimensionMismatch,
  TooFewFrames,
  IoFailure,
  DegenerateInput,
  EigFailure,
  EmptyMask,
  AllZero,
  TooShort,
  MixedFps,
  LengthMismatch,
  SequenceTooShort,
  FrameTooSmall,
  InsufficientSubjects,
  InsufficientSamples,
  LabelOutsideClassSet,
  EmptyClass,
  MalformedManifest,
};

std::string_view to_string(ErrorCode code);

// Domain error carrying a machine-checkable code. Recoverable numerical
// conditions (singular systems, non-convergence) are reported as flags on
// the result types instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace modesift
