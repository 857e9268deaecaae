#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sketch3d/error.hpp"
#include "sketch3d/sketch.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

using testing::RandomImage;

Image OracleDodge(const Image& g, const SketchParams& p) { return oracle::Dodge(g, p); }
Image OracleStylize(const Image& g, const SketchParams& p) { return oracle::Stylize(g, p); }

TEST(Dodge, ConstantImageGoesNearWhite) {
  for (int c : {1, 50, 128, 254, 255}) {
    const Image out = Dodge(Image(20, 20, 1, static_cast<std::uint8_t>(c)));
    for (auto v : out.data()) EXPECT_GE(v, 254);
  }
}

TEST(Dodge, AllZeroHitsDivisionByZeroRule) {
  EXPECT_EQ(Dodge(Image(12, 12, 1, 0)), Image(12, 12, 1, 255));
}

TEST(Dodge, StepEdgeMatchesFormulaExactly) {
  Image step(16, 16, 1, 0);
  for (int y = 0; y < 16; ++y) {
    for (int x = 8; x < 16; ++x) step.at(x, y) = 255;
  }
  SketchParams p;
  p.blur_sigma = 2.0;  // small enough that both halves have a flat interior
  const Image out = Dodge(step, p);
  EXPECT_EQ(out, OracleDodge(step, p));
  EXPECT_EQ(Dodge(step), OracleDodge(step, {}));
  // Flat regions are paper-white; the dark side next to the edge forms a band.
  EXPECT_EQ(out.at(0, 8), 255);
  EXPECT_EQ(out.at(15, 8), 255);
  EXPECT_LT(out.at(7, 8), out.at(0, 8));
}

TEST(Dodge, RejectsMultichannel) {
  EXPECT_THROW(Dodge(Image(8, 8, 3)), Error);
  EXPECT_THROW(Stylize(Image(8, 8, 3)), Error);
}

TEST(Dodge, NeverDarkensWhereMaskBelowWhite) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image g = RandomImage(32, 32, 1, seed);
    const Image mask = Invert(GaussianBlur(Invert(g), 8.0));
    const Image out = Dodge(g);
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      if (mask.data()[i] <= 255 && mask.data()[i] > 0) EXPECT_GE(out.data()[i], g.data()[i]);
    }
  }
}

TEST(Stylize, ConstantGivesUniform127) {
  for (int c : {0, 17, 200, 255}) {
    EXPECT_EQ(Stylize(Image(25, 25, 1, static_cast<std::uint8_t>(c))), Image(25, 25, 1, 127));
  }
}

TEST(Stylize, FlatInteriorIgnoresDcOffset) {
  const Image a(48, 48, 1, 100), b(48, 48, 1, 140);
  const Image sa = Stylize(a), sb = Stylize(b);
  for (int y = 12; y < 36; ++y) {
    for (int x = 12; x < 36; ++x) EXPECT_EQ(sa.at(x, y), sb.at(x, y));
  }
}

TEST(Stylize, ThinDarkLineMatchesFormulaExactly) {
  Image line(32, 32, 1, 255);
  for (int y = 0; y < 32; ++y) line.at(15, y) = 0;
  const SketchParams p;
  const Image out = Stylize(line, p);
  EXPECT_EQ(out, OracleStylize(line, p));
  // Negated high-pass: the line itself saturates, its flanks sit below the 127 background.
  EXPECT_EQ(out.at(15, 16), 255);
  EXPECT_LT(out.at(14, 16), 127);
  EXPECT_EQ(out.at(0, 16), 127);
}

TEST(SketchFilter, BruteForceOracleOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Image g = RandomImage(32, 32, 1, 100 + seed);
    SketchParams p;
    p.blur_sigma = 1.0 + static_cast<double>(seed);
    p.highpass_sigma = 0.5 + 0.5 * static_cast<double>(seed);
    EXPECT_EQ(Dodge(g, p), OracleDodge(g, p));
    EXPECT_EQ(Stylize(g, p), OracleStylize(g, p));
  }
}

TEST(Sketchify, WhitePhotoGivesUniform127) {
  EXPECT_EQ(Sketchify(Image(40, 30, 3, 255)), Image(40, 30, 1, 127));
}

TEST(Sketchify, DeterministicAndShapePreserving) {
  const Image photo = RandomImage(45, 33, 3, 7);
  const Image a = Sketchify(photo), b = Sketchify(photo);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.width(), 45);
  EXPECT_EQ(a.height(), 33);
  EXPECT_EQ(a.channels(), 1);
}

TEST(Sketchify, AppliedTwiceStaysValid) {
  const Image twice = Sketchify(Sketchify(RandomImage(40, 40, 3, 8)));
  EXPECT_EQ(twice.width(), 40);
  EXPECT_EQ(twice.height(), 40);
  EXPECT_EQ(twice.channels(), 1);
}

TEST(SketchParams, ValidationRejectsBadSigmas) {
  SketchParams p;
  p.blur_sigma = 0;
  EXPECT_THROW(Sketchify(Image(8, 8, 1), p), Error);
  p = {};
  p.highpass_sigma = -2;
  EXPECT_THROW(Sketchify(Image(8, 8, 1), p), Error);
}

}  // namespace
}  // namespace sketch3d
