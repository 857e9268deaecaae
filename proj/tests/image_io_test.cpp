#include <gtest/gtest.h>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

using testing::RandomImage;
using testing::TempDir;

TEST(Png, RoundTripGrayAndRgb) {
  for (int ch : {1, 3}) {
    const Image img = RandomImage(37, 21, ch, static_cast<std::uint64_t>(ch));
    const auto bytes = EncodePng(img);
    EXPECT_EQ(DecodeImage(bytes), img);
    const PngInfo info = ProbePng(bytes);
    EXPECT_EQ(info.width, 37);
    EXPECT_EQ(info.height, 21);
    EXPECT_EQ(info.channels, ch);
    EXPECT_EQ(info.bit_depth, 8);
    EXPECT_FALSE(info.has_alpha);
  }
}

TEST(Png, EncodingIsDeterministic) {
  const Image img = RandomImage(64, 64, 3, 3);
  EXPECT_EQ(EncodePng(img), EncodePng(img));
}

TEST(Png16, RoundTrip) {
  Gray16Image g{5, 3, {}};
  for (int i = 0; i < 15; ++i) g.data.push_back(static_cast<std::uint16_t>(i * 4369));
  const auto bytes = EncodePng16(g);
  const Gray16Image back = DecodePng16(bytes);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.data, g.data);
  const PngInfo info = ProbePng(bytes);
  EXPECT_EQ(info.bit_depth, 16);
  EXPECT_EQ(info.channels, 1);
}

TEST(Png16, EightBitInputRejected) {
  EXPECT_THROW(DecodePng16(EncodePng(Image(4, 4, 1))), Error);
}

TEST(Jpeg, RoundTripIsClose) {
  const Image img(32, 32, 3, 180);
  const Image back = DecodeImage(EncodeJpeg(img));
  ASSERT_EQ(back.width(), 32);
  ASSERT_EQ(back.channels(), 3);
  for (auto v : back.data()) EXPECT_NEAR(v, 180, 2);
}

TEST(Decode, GarbageRaisesIoError) {
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5, 6, 7, 8, 9};
  try {
    DecodeImage(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Files, WriteReadAndNoTempLeftovers) {
  TempDir dir;
  const Image img = RandomImage(16, 16, 1, 8);
  WriteImage(dir / "a.png", img);
  EXPECT_EQ(ReadImage(dir / "a.png"), img);
  WriteImage(dir / "b.jpg", Image(16, 16, 3, 10));
  EXPECT_EQ(ReadImage(dir / "b.jpg").width(), 16);
  int count = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++count;
  EXPECT_EQ(count, 2);
  EXPECT_THROW(ReadImage(dir / "missing.png"), Error);
}

}  // namespace
}  // namespace sketch3d
