#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "sketch3d/adapter.hpp"
#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::WriteScript;

AdapterFailureReason ReasonOf(const AdapterSpec& spec, const fs::path& in, const fs::path& out) {
  try {
    InvokeAdapter(spec, in, out);
  } catch (const AdapterFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAdapterFailure);
    return e.reason();
  }
  ADD_FAILURE() << "adapter unexpectedly succeeded";
  return AdapterFailureReason::kLaunch;
}

class AdapterTest : public ::testing::Test {
 protected:
  void SetUp() override {
    input_ = dir_ / "in.png";
    WriteImage(input_, testing::RandomImage(48, 32, 3, 1));
  }
  TempDir dir_;
  fs::path input_;
};

TEST_F(AdapterTest, IdentityStubIsByteIdentical) {
  InvokeAdapter({STYLE_STUB, AdapterKind::kStyle, 30}, input_, dir_ / "out.png");
  EXPECT_EQ(ReadFileBytes(dir_ / "out.png"), ReadFileBytes(input_));
}

TEST_F(AdapterTest, IdentityStubPromotesGrayToRgb) {
  WriteImage(dir_ / "gray.png", Image(20, 10, 1, 70));
  InvokeAdapter({STYLE_STUB, AdapterKind::kStyle, 30}, dir_ / "gray.png", dir_ / "out.png");
  EXPECT_EQ(ReadImage(dir_ / "out.png"), Image(20, 10, 3, 70));
}

TEST_F(AdapterTest, GradientStubRows) {
  InvokeAdapter({DEPTH_STUB, AdapterKind::kDepth, 30}, input_, dir_ / "d.png");
  const Gray16Image d = ReadPng16(dir_ / "d.png");
  ASSERT_EQ(d.width, 48);
  ASSERT_EQ(d.height, 32);
  for (int y = 0; y < 32; ++y) {
    const auto expected = static_cast<std::uint16_t>(std::lround(65535.0 * y / 31));
    for (int x = 0; x < 48; ++x) EXPECT_EQ(d.at(x, y), expected);
  }
  EXPECT_EQ(d.at(0, 0), 0);
  EXPECT_EQ(d.at(0, 31), 65535);
}

TEST_F(AdapterTest, WrongSizeOutputIsInvalid) {
  WriteImage(dir_ / "small.png", Image(10, 10, 3, 0));
  WriteScript(dir_ / "bad.sh", "cp " + (dir_ / "small.png").string() + " \"$4\"");
  EXPECT_EQ(ReasonOf({dir_ / "bad.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kInvalidOutput);
}

TEST_F(AdapterTest, StyleOutputMustBeRgb) {
  WriteImage(dir_ / "gray.png", Image(48, 32, 1, 0));
  WriteScript(dir_ / "gray.sh", "cp " + (dir_ / "gray.png").string() + " \"$4\"");
  EXPECT_EQ(ReasonOf({dir_ / "gray.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kInvalidOutput);
}

TEST_F(AdapterTest, DepthOutputMustBeSixteenBit) {
  WriteImage(dir_ / "d8.png", Image(48, 32, 1, 0));
  WriteScript(dir_ / "d8.sh", "cp " + (dir_ / "d8.png").string() + " \"$4\"");
  EXPECT_EQ(ReasonOf({dir_ / "d8.sh", AdapterKind::kDepth, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kInvalidOutput);
}

TEST_F(AdapterTest, GarbageOutputIsInvalid) {
  WriteScript(dir_ / "junk.sh", "echo junk > \"$4\"");
  EXPECT_EQ(ReasonOf({dir_ / "junk.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kInvalidOutput);
}

TEST_F(AdapterTest, NonzeroExitCarriesDiagnostics) {
  WriteScript(dir_ / "fail.sh", "echo 'checkpoint not found' >&2\nexit 3");
  try {
    InvokeAdapter({dir_ / "fail.sh", AdapterKind::kDepth, 30}, input_, dir_ / "o.png");
    FAIL();
  } catch (const AdapterFailure& e) {
    EXPECT_EQ(e.reason(), AdapterFailureReason::kNonzeroExit);
    EXPECT_NE(e.diagnostics().find("checkpoint not found"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("exit code 3"), std::string::npos);
  }
}

TEST_F(AdapterTest, MissingOutput) {
  WriteScript(dir_ / "lazy.sh", "exit 0");
  EXPECT_EQ(ReasonOf({dir_ / "lazy.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kMissingOutput);
}

TEST_F(AdapterTest, TimeoutKillsAdapter) {
  WriteScript(dir_ / "slow.sh", "sleep 30");
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(ReasonOf({dir_ / "slow.sh", AdapterKind::kStyle, 0.3}, input_, dir_ / "o.png"),
            AdapterFailureReason::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));
  EXPECT_FALSE(fs::exists(dir_ / "o.png"));
}

TEST_F(AdapterTest, LaunchFailures) {
  EXPECT_EQ(ReasonOf({dir_ / "nope", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kLaunch);
  std::ofstream(dir_ / "plain.sh") << "#!/bin/sh\n";
  fs::permissions(dir_ / "plain.sh", fs::perms::owner_read | fs::perms::owner_write);
  EXPECT_EQ(ReasonOf({dir_ / "plain.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kLaunch);
}

TEST_F(AdapterTest, StaleOutputIsNotMistakenForSuccess) {
  fs::copy_file(input_, dir_ / "o.png");
  WriteScript(dir_ / "lazy.sh", "exit 0");
  EXPECT_EQ(ReasonOf({dir_ / "lazy.sh", AdapterKind::kStyle, 30}, input_, dir_ / "o.png"),
            AdapterFailureReason::kMissingOutput);
}

TEST(AdapterFailure, MessageNamesReason) {
  const AdapterFailure e(AdapterFailureReason::kTimeout, "slow", "log");
  EXPECT_EQ(std::string(e.what()).rfind("timeout", 0), 0u);
  EXPECT_STREQ(ToString(AdapterFailureReason::kInvalidOutput), "invalid-output");
}

}  // namespace
}  // namespace sketch3d
