#pragma once

#include <vector>

#include "sketch3d/features.hpp"
#include "sketch3d/homography.hpp"
#include "sketch3d/image.hpp"

namespace sketch3d {

struct StitchOptions {
  RansacConfig ransac;
  int max_features = 1500;
};

struct StitchResult {
  Image canvas;
  // 255 where some drawing contributed, 0 for white fill.
  Image coverage;
  // Step-2 estimate, drawing 1 -> drawing 2 frame.
  Homography homography;
  // Mean of (p2 - p1) over the translation-consistent stage-3 matches, where
  // p1 is in the warped-drawing-1 raster and p2 in drawing 2.
  Point2 translation;
  // Drawing 1 -> drawing 2 map including the step-4 correction.
  Homography composite;
  // Top-left corners of the warped drawing 1 raster and of drawing 2 inside
  // the canvas.
  int warped_origin_x = 0;
  int warped_origin_y = 0;
  int d2_origin_x = 0;
  int d2_origin_y = 0;
  int stage1_matches = 0;
  int stage2_matches = 0;
  int ransac_inliers = 0;
  int translation_inliers = 0;
  double inlier_ratio = 0.0;
};

// Match, homography-warp drawing 1 into drawing 2's view, re-detect and
// re-match on the warped raster, then place drawing 2 on top by the mean
// consensus translation. Throws StitchFailure when either stage falls short.
StitchResult StitchPair(const Image& d1, const Image& d2, const RansacConfig& cfg);
StitchResult StitchPair(const Image& d1, const Image& d2, const StitchOptions& options,
                        const Image* d1_coverage = nullptr);

struct StitchManyResult {
  StitchResult final;
  std::vector<StitchResult> steps;
};

// Left fold of StitchPair over the ordered drawings. A failure at fold step k
// (1-based: stitching drawing k+1 onto the result so far) reports step k.
StitchManyResult StitchMany(const std::vector<Image>& drawings, const RansacConfig& cfg);
StitchManyResult StitchMany(const std::vector<Image>& drawings, const StitchOptions& options);

}  // namespace sketch3d
