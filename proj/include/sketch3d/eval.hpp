#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sketch3d/homography.hpp"
#include "sketch3d/image.hpp"
#include "sketch3d/sketch.hpp"
#include "sketch3d/stitch.hpp"

namespace sketch3d {

// Two overlapping vertical pieces of one drawing; the right piece is warped
// by a random homography.
struct ToyPair {
  Image left;
  Image right;
  // Valid-pixel mask of `right` (the warp leaves white fill around it).
  Image right_coverage;
  // Right (warped) raster frame -> left piece frame.
  Homography true_h;
  double overlap_fraction = 0.0;
  double max_corner_shift = 0.0;
  std::uint64_t seed = 0;
  int source_width = 0;
  int piece_width = 0;
};

// Piece width before warping: round((1 + overlap) / 2 * width).
int ToyPieceWidth(int width, double overlap_fraction);

ToyPair MakeToyPair(const Image& sketch, double overlap_fraction, double max_corner_shift,
                    std::uint64_t seed);

// Same geometry, but the left piece is cut from `left_source` and the right
// piece from `right_source` (two renderings of one drawing).
ToyPair MakeToyPair(const Image& left_source, const Image& right_source,
                    double overlap_fraction, double max_corner_shift, std::uint64_t seed);

// Corners of the overlap strip expressed in the right (warped) raster frame.
std::vector<Point2> OverlapCornersInRight(const ToyPair& pair);

struct MatchReport {
  int stage1_matches = 0;
  int stage2_matches = 0;
  int ransac_inliers = 0;
  double inlier_ratio = 0.0;
  // Absent when the stitch failed.
  std::optional<double> corner_rmse;
  bool success = false;
  // Which piece played drawing 1 -> drawing 2.
  std::string orientation = "right->left";
  std::string failure;
};

// Stitches right (drawing 1) onto left (drawing 2). Failures are reported,
// not thrown.
MatchReport EvaluateStitch(const ToyPair& pair, const RansacConfig& cfg);
MatchReport EvaluateStitch(const ToyPair& pair, const StitchOptions& options);

// blur_sigma * (1 + 2k), highpass_sigma * (1 + k); k = 1 gives x3 / x2.
SketchParams PerturbStyle(const SketchParams& base, double k);

// White page with black strokes: facades, windows, roofs, arcs and scribbles.
Image SyntheticDrawing(int width, int height, std::uint64_t seed);

struct SweepGrid {
  std::vector<double> overlaps{0.4};
  std::vector<double> corner_shifts{0.05};
  std::vector<double> style_perturbations{0.0};
  std::vector<std::uint64_t> seeds{0};
};

struct SweepRow {
  int cell = 0;
  double overlap = 0.0;
  double corner_shift = 0.0;
  double style_perturbation = 0.0;
  std::uint64_t seed = 0;
  MatchReport report;
};

// Every (cell, seed) combination, cells ordered overlap-major, then corner
// shift, then style. Both pieces are rendered from `source` by the sketch
// filter; the right one with PerturbStyle(base, style_perturbation).
std::vector<SweepRow> Sweep(const Image& source, const SweepGrid& grid,
                            const SketchParams& base, const StitchOptions& options);

std::string SweepCsvHeader();
std::string ToCsvLine(const SweepRow& row);
std::string ToCsv(const std::vector<SweepRow>& rows);

}  // namespace sketch3d
