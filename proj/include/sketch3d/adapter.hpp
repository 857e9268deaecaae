#pragma once

#include <filesystem>
#include <string>

namespace sketch3d {

enum class AdapterKind { kStyle, kDepth };

const char* ToString(AdapterKind kind);

// An external process speaking `<executable> --input <in> --output <out>`.
struct AdapterSpec {
  std::filesystem::path executable;
  AdapterKind kind = AdapterKind::kStyle;
  double timeout_seconds = 300.0;
};

// Throws AdapterFailure(launch) unless the executable exists and is runnable.
void CheckAdapter(const AdapterSpec& spec);

// Runs the adapter and validates its output against the protocol:
//   style: 8-bit 3-channel PNG with the input's dimensions;
//   depth: 16-bit single-channel PNG with the input's dimensions,
//          0 = nearest, 65535 = farthest.
// Any stale file at `output` is removed first. Failures carry the adapter's
// captured stderr.
void InvokeAdapter(const AdapterSpec& spec, const std::filesystem::path& input,
                   const std::filesystem::path& output);

// Protocol checks on an already-produced output file.
void ValidateAdapterOutput(AdapterKind kind, const std::filesystem::path& input,
                           const std::filesystem::path& output);

}  // namespace sketch3d
