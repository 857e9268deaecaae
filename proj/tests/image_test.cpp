#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketch3d/error.hpp"
#include "sketch3d/image.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

using testing::RandomImage;

TEST(Quantize, RoundsHalfAwayFromZeroAndClamps) {
  EXPECT_EQ(QuantizeToByte(2.5), 3);
  EXPECT_EQ(QuantizeToByte(2.4999), 2);
  EXPECT_EQ(QuantizeToByte(-0.4), 0);
  EXPECT_EQ(QuantizeToByte(-7.0), 0);
  EXPECT_EQ(QuantizeToByte(254.5), 255);
  EXPECT_EQ(QuantizeToByte(1e9), 255);
}

TEST(ImageType, RejectsMismatchedBuffer) {
  EXPECT_THROW(Image(4, 4, 1, std::vector<std::uint8_t>(15)), Error);
  EXPECT_THROW(Image(0, 4, 1), Error);
  EXPECT_THROW(Image(4, 4, 2), Error);
}

TEST(Grayscale, WhiteBlackAndPureRed) {
  EXPECT_EQ(ToGrayscale(Image(3, 2, 3, 255)), Image(3, 2, 1, 255));
  EXPECT_EQ(ToGrayscale(Image(3, 2, 3, 0)), Image(3, 2, 1, 0));
  Image red(1, 1, 3, 0);
  red.at(0, 0, 0) = 255;
  EXPECT_EQ(ToGrayscale(red).at(0, 0), 76);
}

TEST(Grayscale, IdempotentOnSingleChannel) {
  const Image g = RandomImage(9, 7, 1, 1);
  EXPECT_EQ(ToGrayscale(g), g);
  EXPECT_EQ(ToGrayscale(ToGrayscale(RandomImage(9, 7, 3, 2))),
            ToGrayscale(RandomImage(9, 7, 3, 2)));
}

TEST(Invert, ConstantsAndInvolution) {
  EXPECT_EQ(Invert(Image(5, 5, 1, 0)), Image(5, 5, 1, 255));
  EXPECT_EQ(Invert(Image(5, 5, 1, 128)), Image(5, 5, 1, 127));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image img = RandomImage(13, 11, 3, seed);
    EXPECT_EQ(Invert(Invert(img)), img);
  }
}

TEST(GaussianBlur, ConstantImageUnchanged) {
  for (double sigma : {0.3, 1.0, 4.0, 8.0}) {
    EXPECT_EQ(GaussianBlur(Image(20, 17, 1, 93), sigma), Image(20, 17, 1, 93));
  }
}

TEST(GaussianBlur, ImpulseGivesSampledNormalizedGaussian) {
  const int n = 15, c = 7;
  FloatImage impulse(n, n, 1, 0.0);
  impulse.at(c, c) = 1.0;
  const FloatImage out = GaussianBlur(impulse, 1.0);

  // Radius ceil(3 sigma) = 3 taps each side.
  double z = 0.0;
  for (int d = -3; d <= 3; ++d) z += std::exp(-d * d / 2.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int dx = x - c, dy = y - c;
      double expected = 0.0;
      if (std::abs(dx) <= 3 && std::abs(dy) <= 3) {
        expected = std::exp(-dx * dx / 2.0) / z * std::exp(-dy * dy / 2.0) / z;
      }
      EXPECT_NEAR(out.at(x, y), expected, 1e-12) << x << "," << y;
    }
  }
}

TEST(GaussianBlur, KernelRadiusAndNormalization) {
  for (double sigma : {0.5, 1.0, 2.2, 8.0}) {
    const auto k = GaussianKernel(sigma);
    EXPECT_EQ(static_cast<int>(k.size()), 2 * static_cast<int>(std::ceil(3 * sigma)) + 1);
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(GaussianBlur, PreservesMeanOnNoise) {
  const Image noise = RandomImage(64, 64, 1, 42);
  const auto mean = [](const Image& img) {
    double s = 0;
    for (auto v : img.data()) s += v;
    return s / static_cast<double>(img.data().size());
  };
  EXPECT_NEAR(mean(GaussianBlur(noise, 1.5)), mean(noise), 0.5);
}

TEST(GaussianBlur, OutputStaysWithinInputRange) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Image img = RandomImage(24, 19, 3, seed);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(40 + v % 100);
    const Image out = GaussianBlur(img, 0.5 + static_cast<double>(seed));
    for (int c = 0; c < 3; ++c) {
      int lo = 255, hi = 0, olo = 255, ohi = 0;
      for (int y = 0; y < 19; ++y) {
        for (int x = 0; x < 24; ++x) {
          lo = std::min<int>(lo, img.at(x, y, c));
          hi = std::max<int>(hi, img.at(x, y, c));
          olo = std::min<int>(olo, out.at(x, y, c));
          ohi = std::max<int>(ohi, out.at(x, y, c));
        }
      }
      EXPECT_GE(olo, lo);
      EXPECT_LE(ohi, hi);
    }
  }
}

TEST(GaussianBlur, RejectsNonPositiveSigma) {
  EXPECT_THROW(GaussianBlur(Image(4, 4, 1), 0.0), Error);
  EXPECT_THROW(GaussianBlur(Image(4, 4, 1), -1.0), Error);
}

TEST(Resize, SameSizeIsIdentity) {
  const Image img = RandomImage(31, 17, 3, 5);
  EXPECT_EQ(Resize(img, 31, 17), img);
}

TEST(Resize, ConstantStaysConstant) {
  EXPECT_EQ(Resize(Image(7, 5, 1, 200), 23, 3), Image(23, 3, 1, 200));
  EXPECT_EQ(Resize(Image(40, 40, 3, 17), 9, 11), Image(9, 11, 3, 17));
}

TEST(Resize, CheckerboardUpsampleHandEvaluated) {
  // Pixel-center alignment: output 0..3 samples source 0, .25, .75, 1 (clamped).
  const Image board(2, 2, 1, std::vector<std::uint8_t>{0, 255, 255, 0});
  const std::vector<std::uint8_t> expected{
      0,   64,  191, 255,
      64,  96,  159, 191,
      191, 159, 96,  64,
      255, 191, 64,  0,
  };
  EXPECT_EQ(Resize(board, 4, 4), Image(4, 4, 1, expected));
}

TEST(Resize, RejectsZeroTarget) {
  EXPECT_THROW(Resize(Image(4, 4, 1), 0, 4), Error);
  EXPECT_THROW(Resize(Image(4, 4, 1), 4, 0), Error);
}

TEST(Crop, FullExtentIsIdentityAndRegionCopiesExactly) {
  const Image img = RandomImage(20, 10, 3, 9);
  EXPECT_EQ(Crop(img, 0, 0, 20, 10), img);
  const Image sub = Crop(img, 3, 2, 5, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(sub.at(x, y, c), img.at(x + 3, y + 2, c));
    }
  }
}

TEST(Crop, OutOfBoundsRejected) {
  const Image img(10, 10, 1);
  EXPECT_THROW(Crop(img, 5, 5, 6, 1), Error);
  EXPECT_THROW(Crop(img, -1, 0, 2, 2), Error);
  EXPECT_THROW(Crop(img, 0, 0, 0, 2), Error);
}

TEST(Crop, DiscardFractionsForTrainingSizes) {
  const Image big(400, 400, 1);
  const Image c = Crop(big, 40, 40, 320, 320);
  EXPECT_DOUBLE_EQ(1.0 - static_cast<double>(c.data().size()) / big.data().size(), 0.36);
  const Image small(286, 286, 1);
  const Image c2 = Crop(small, 15, 15, 256, 256);
  EXPECT_NEAR(1.0 - static_cast<double>(c2.data().size()) / small.data().size(), 0.199, 1e-3);
}

TEST(Determinism, RepeatedOperationsAreByteIdentical) {
  const Image img = RandomImage(50, 40, 3, 77);
  EXPECT_EQ(GaussianBlur(img, 2.3), GaussianBlur(img, 2.3));
  EXPECT_EQ(Resize(img, 33, 61), Resize(img, 33, 61));
}

}  // namespace
}  // namespace sketch3d
