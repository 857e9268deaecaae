#pragma once

#include <stdexcept>
#include <string>

namespace sketch3d {

enum class ErrorCode {
  kInvalidParameter,
  kInsufficientData,
  kDegenerateGeometry,
  kAtInfinity,
  kNoConsensus,
  kStitchFailure,
  kDegenerateDepth,
  kAdapterFailure,
  kIo,
};

const char* ToString(ErrorCode code);

// Base exception for every failure the library reports. The code lets callers
// (and the CLI's exit-code mapping) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the match counts of the stage that gave up, and for multi-image
// stitching the index of the failing fold step (0 for a single pair).
class StitchFailure : public Error {
 public:
  StitchFailure(const std::string& message, int stage1_matches,
                int stage2_matches, int step = 0, int ransac_inliers = 0)
      : Error(ErrorCode::kStitchFailure, message),
        stage1_matches_(stage1_matches),
        stage2_matches_(stage2_matches),
        step_(step),
        ransac_inliers_(ransac_inliers) {}

  int stage1_matches() const { return stage1_matches_; }
  int stage2_matches() const { return stage2_matches_; }
  int step() const { return step_; }
  // Homography consensus size when the failure came after step 2, else 0.
  int ransac_inliers() const { return ransac_inliers_; }

 private:
  int stage1_matches_;
  int stage2_matches_;
  int step_;
  int ransac_inliers_;
};

enum class AdapterFailureReason {
  kLaunch,
  kTimeout,
  kNonzeroExit,
  kMissingOutput,
  kInvalidOutput,
};

const char* ToString(AdapterFailureReason reason);

class AdapterFailure : public Error {
 public:
  AdapterFailure(AdapterFailureReason reason, const std::string& message,
                 std::string diagnostics = {})
      : Error(ErrorCode::kAdapterFailure,
              std::string(ToString(reason)) + ": " + message),
        reason_(reason),
        diagnostics_(std::move(diagnostics)) {}

  AdapterFailureReason reason() const { return reason_; }
  // Captured stderr of the adapter process, possibly truncated.
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  AdapterFailureReason reason_;
  std::string diagnostics_;
};

}  // namespace sketch3d
