#include "modesift/error.hpp"

namespace modesift {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedData: return "MalformedData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EigFailure: return "EigFailure";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::MixedFps: return "MixedFps";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::InsufficientSubjects: return "InsufficientSubjects";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::LabelOutsideClassSet: return "LabelOutsideClassSet";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace modesift
