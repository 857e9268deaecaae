#include "sketch3d/adapter.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>
#include <vector>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"

extern char** environ;

namespace sketch3d {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxDiagnostics = 4096;

std::string Tail(const fs::path& log) {
  std::error_code ec;
  if (!fs::exists(log, ec)) return {};
  try {
    const auto bytes = ReadFileBytes(log);
    const std::size_t start = bytes.size() > kMaxDiagnostics ? bytes.size() - kMaxDiagnostics : 0;
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.end());
  } catch (const Error&) {
    return {};
  }
}

struct Dimensions {
  int width = 0;
  int height = 0;
};

Dimensions InputDimensions(const fs::path& input) {
  const auto bytes = ReadFileBytes(input);
  try {
    const PngInfo info = ProbePng(bytes);
    return {info.width, info.height};
  } catch (const Error&) {
    const Image img = DecodeImage(bytes);
    return {img.width(), img.height()};
  }
}

}  // namespace

const char* ToString(AdapterKind kind) {
  return kind == AdapterKind::kStyle ? "style" : "depth";
}

void CheckAdapter(const AdapterSpec& spec) {
  std::error_code ec;
  if (!fs::is_regular_file(spec.executable, ec)) {
    throw AdapterFailure(AdapterFailureReason::kLaunch,
                         std::string(ToString(spec.kind)) + " adapter not found: " +
                             spec.executable.string());
  }
  if (::access(spec.executable.c_str(), X_OK) != 0) {
    throw AdapterFailure(AdapterFailureReason::kLaunch,
                         std::string(ToString(spec.kind)) + " adapter is not executable: " +
                             spec.executable.string());
  }
  if (!(spec.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "adapter timeout must be > 0");
  }
}

void ValidateAdapterOutput(AdapterKind kind, const fs::path& input, const fs::path& output) {
  const Dimensions in = InputDimensions(input);
  std::vector<std::uint8_t> bytes;
  PngInfo info;
  try {
    bytes = ReadFileBytes(output);
    info = ProbePng(bytes);
  } catch (const Error& e) {
    throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                         output.string() + " is not a PNG: " + e.what());
  }
  if (info.width != in.width || info.height != in.height) {
    throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                         "output is " + std::to_string(info.width) + "x" +
                             std::to_string(info.height) + ", input is " +
                             std::to_string(in.width) + "x" + std::to_string(in.height));
  }
  try {
    if (kind == AdapterKind::kStyle) {
      if (info.channels != 3 || info.has_alpha || info.bit_depth != 8) {
        throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                             "style output must be an 8-bit 3-channel PNG");
      }
      (void)DecodeImage(bytes);
    } else {
      if (info.channels != 1 || info.has_alpha || info.bit_depth != 16) {
        throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                             "depth output must be a 16-bit single-channel PNG");
      }
      (void)DecodePng16(bytes);
    }
  } catch (const AdapterFailure&) {
    throw;
  } catch (const Error& e) {
    throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                         "output does not decode: " + std::string(e.what()));
  }
}

void InvokeAdapter(const AdapterSpec& spec, const fs::path& input, const fs::path& output) {
  CheckAdapter(spec);
  std::error_code ec;
  if (!fs::exists(input, ec)) {
    throw Error(ErrorCode::kIo, "adapter input missing: " + input.string());
  }
  fs::remove(output, ec);
  fs::path log = output;
  log += ".log";

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  // Own process group, so a timeout also reaps anything the adapter forked.
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const std::string exe = spec.executable.string();
  const std::string in = input.string();
  const std::string out = output.string();
  std::vector<char*> argv = {const_cast<char*>(exe.c_str()), const_cast<char*>("--input"),
                             const_cast<char*>(in.c_str()), const_cast<char*>("--output"),
                             const_cast<char*>(out.c_str()), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe.c_str(), &actions, &attr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw AdapterFailure(AdapterFailureReason::kLaunch,
                         "cannot start " + exe + ": " + std::strerror(rc));
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(spec.timeout_seconds);
  int status = 0;
  while (true) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      throw AdapterFailure(AdapterFailureReason::kLaunch, "lost track of adapter process");
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      fs::remove(output, ec);
      throw AdapterFailure(AdapterFailureReason::kTimeout,
                           std::string(ToString(spec.kind)) + " adapter exceeded " +
                               std::to_string(spec.timeout_seconds) + " s",
                           Tail(log));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status)
                                ? "exit code " + std::to_string(WEXITSTATUS(status))
                                : "signal " + std::to_string(WTERMSIG(status));
    throw AdapterFailure(AdapterFailureReason::kNonzeroExit,
                         std::string(ToString(spec.kind)) + " adapter failed with " + how,
                         Tail(log));
  }
  if (!fs::exists(output, ec)) {
    throw AdapterFailure(AdapterFailureReason::kMissingOutput,
                         std::string(ToString(spec.kind)) + " adapter wrote no " + out,
                         Tail(log));
  }
  try {
    ValidateAdapterOutput(spec.kind, input, output);
  } catch (const AdapterFailure& e) {
    throw AdapterFailure(AdapterFailureReason::kInvalidOutput,
                         std::string(ToString(spec.kind)) + " adapter: " + e.what(), Tail(log));
  }
}

}  // namespace sketch3d
