#include "sketch3d/error.hpp"

namespace sketch3d {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::kAtInfinity: return "at-infinity";
    case ErrorCode::kNoConsensus: return "no-consensus";
    case ErrorCode::kStitchFailure: return "stitch-failure";
    case ErrorCode::kDegenerateDepth: return "degenerate-depth";
    case ErrorCode::kAdapterFailure: return "adapter-failure";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

const char* ToString(AdapterFailureReason reason) {
  switch (reason) {
    case AdapterFailureReason::kLaunch: return "launch";
    case AdapterFailureReason::kTimeout: return "timeout";
    case AdapterFailureReason::kNonzeroExit: return "nonzero-exit";
    case AdapterFailureReason::kMissingOutput: return "missing-output";
    case AdapterFailureReason::kInvalidOutput: return "invalid-output";
  }
  return "unknown";
}

}  // namespace sketch3d
