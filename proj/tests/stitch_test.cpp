#include <gtest/gtest.h>

#include <cmath>

#include "sketch3d/error.hpp"
#include "sketch3d/eval.hpp"
#include "sketch3d/sketch.hpp"
#include "sketch3d/stitch.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

const Image& Drawing() {
  static const Image img = Sketchify(SyntheticDrawing(720, 360, 5));
  return img;
}

std::vector<Image> Strips() {
  return {Crop(Drawing(), 0, 0, 320, 360), Crop(Drawing(), 200, 0, 320, 360),
          Crop(Drawing(), 400, 0, 320, 360)};
}

TEST(StitchPair, SelfStitchIsIdentity) {
  const Image d = Crop(Drawing(), 100, 0, 360, 360);
  const StitchResult r = StitchPair(d, d, RansacConfig{});
  EXPECT_LT(CanonicalDistance(r.homography, Homography::Identity()), 1e-3);
  EXPECT_LT(std::abs(r.translation.x), 0.5);
  EXPECT_LT(std::abs(r.translation.y), 0.5);
  EXPECT_EQ(Crop(r.canvas, r.d2_origin_x, r.d2_origin_y, d.width(), d.height()), d);
  EXPECT_GE(r.inlier_ratio, 0.0);
  EXPECT_LE(r.inlier_ratio, 1.0);
}

TEST(StitchPair, WhiteImagesFailWithZeroMatches) {
  const Image white(200, 200, 1, 255);
  try {
    StitchPair(white, white, RansacConfig{});
    FAIL() << "expected stitch failure";
  } catch (const StitchFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStitchFailure);
    EXPECT_EQ(e.stage1_matches(), 0);
    EXPECT_EQ(e.stage2_matches(), 0);
  }
}

TEST(StitchPair, TooSmallRejected) {
  EXPECT_THROW(StitchPair(Image(63, 100, 1), Image(100, 100, 1), RansacConfig{}), Error);
}

TEST(StitchPair, DrawingTwoIsOnTopAndHomographyReproducesWarp) {
  const auto strips = Strips();
  const StitchResult r = StitchPair(strips[0], strips[1], RansacConfig{});
  const Image& d1 = strips[0];
  const Image& d2 = strips[1];
  EXPECT_EQ(Crop(r.canvas, r.d2_origin_x, r.d2_origin_y, d2.width(), d2.height()), d2);

  // Canvas pixels owned by drawing 1 map back through the homography into d1.
  const WarpResult w = WarpImage(d1, r.homography);
  const Homography back = r.homography.Inverse();
  double diff = 0;
  int n = 0;
  for (int y = 0; y < r.canvas.height(); ++y) {
    for (int x = 0; x < r.canvas.width(); ++x) {
      const bool under_d2 = x >= r.d2_origin_x && y >= r.d2_origin_y &&
                            x < r.d2_origin_x + d2.width() && y < r.d2_origin_y + d2.height();
      if (under_d2 || r.coverage.at(x, y) == 0) continue;
      const Point2 p = back.Apply({static_cast<double>(x - r.warped_origin_x + w.offset_x),
                                   static_cast<double>(y - r.warped_origin_y + w.offset_y)});
      if (p.x < 1 || p.y < 1 || p.x > d1.width() - 2 || p.y > d1.height() - 2) continue;
      diff += std::abs(SampleBilinear(d1, p.x, p.y) - r.canvas.at(x, y));
      ++n;
    }
  }
  ASSERT_GT(n, 1000);
  EXPECT_LT(diff / n, 2.0);
}

TEST(StitchPair, DeterministicForSeed) {
  const auto strips = Strips();
  RansacConfig cfg;
  cfg.seed = 17;
  const StitchResult a = StitchPair(strips[1], strips[2], cfg);
  const StitchResult b = StitchPair(strips[1], strips[2], cfg);
  EXPECT_EQ(a.canvas, b.canvas);
  EXPECT_TRUE(a.homography.matrix() == b.homography.matrix());
  EXPECT_EQ(a.stage1_matches, b.stage1_matches);
}

TEST(StitchMany, TwoDrawingsEqualStitchPair) {
  const auto strips = Strips();
  const StitchManyResult many = StitchMany({strips[0], strips[1]}, RansacConfig{});
  const StitchResult pair = StitchPair(strips[0], strips[1], RansacConfig{});
  ASSERT_EQ(many.steps.size(), 1u);
  EXPECT_EQ(many.final.canvas, pair.canvas);
  EXPECT_EQ(many.final.stage1_matches, pair.stage1_matches);
}

TEST(StitchMany, ThreeStripsRebuildOriginalWidth) {
  const StitchManyResult r = StitchMany(Strips(), RansacConfig{});
  ASSERT_EQ(r.steps.size(), 2u);
  EXPECT_NEAR(r.final.canvas.width(), Drawing().width(), 5);
  EXPECT_NEAR(r.final.canvas.height(), Drawing().height(), 5);
}

TEST(StitchMany, FailureNamesTheStep) {
  auto strips = Strips();
  strips.push_back(Image(300, 300, 1, 255));
  try {
    StitchMany(strips, RansacConfig{});
    FAIL() << "expected stitch failure";
  } catch (const StitchFailure& e) {
    EXPECT_EQ(e.step(), 3);
    EXPECT_NE(std::string(e.what()).find("step 3"), std::string::npos);
  }
}

TEST(StitchMany, NeedsTwoDrawings) {
  EXPECT_THROW(StitchMany({Drawing()}, RansacConfig{}), Error);
}

}  // namespace
}  // namespace sketch3d
