#include "sketch3d/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch3d/error.hpp"

namespace sketch3d {
namespace {

constexpr int kMinSide = 64;
constexpr int kMinTranslationMatches = 3;

// Counts of uncovered pixels, for O(1) "is this box fully covered" checks.
class UncoveredIntegral {
 public:
  explicit UncoveredIntegral(const Image& coverage)
      : width_(coverage.width()), height_(coverage.height()),
        sums_(static_cast<std::size_t>(width_ + 1) * (height_ + 1), 0) {
    for (int y = 0; y < height_; ++y) {
      long long row = 0;
      for (int x = 0; x < width_; ++x) {
        row += coverage.at(x, y) == 0 ? 1 : 0;
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  bool BoxCovered(double cx, double cy, double radius) const {
    const int x0 = static_cast<int>(std::floor(cx - radius));
    const int y0 = static_cast<int>(std::floor(cy - radius));
    const int x1 = static_cast<int>(std::ceil(cx + radius));
    const int y1 = static_cast<int>(std::ceil(cy + radius));
    if (x0 < 0 || y0 < 0 || x1 >= width_ || y1 >= height_) return false;
    const long long n = get(x1 + 1, y1 + 1) - get(x0, y1 + 1) - get(x1 + 1, y0) + get(x0, y0);
    return n == 0;
  }

 private:
  long long& at(int x, int y) { return sums_[static_cast<std::size_t>(y) * (width_ + 1) + x]; }
  long long get(int x, int y) const {
    return sums_[static_cast<std::size_t>(y) * (width_ + 1) + x];
  }

  int width_;
  int height_;
  std::vector<long long> sums_;
};

// Drops features whose support region touches fill pixels: the white border
// of a warped raster produces corners that belong to neither drawing.
std::vector<Feature> KeepCovered(std::vector<Feature> features, const Image& coverage,
                                 double scale_factor) {
  const UncoveredIntegral integral(coverage);
  std::vector<Feature> kept;
  kept.reserve(features.size());
  for (auto& f : features) {
    const double radius =
        (kOrbPatchRadius + 2) * std::pow(scale_factor, f.keypoint.scale_level);
    if (integral.BoxCovered(f.keypoint.x, f.keypoint.y, radius)) kept.push_back(f);
  }
  return kept;
}

std::vector<PointPair> ToPairs(const std::vector<Match>& matches, const std::vector<Feature>& a,
                               const std::vector<Feature>& b) {
  std::vector<PointPair> pairs;
  pairs.reserve(matches.size());
  for (const auto& m : matches) {
    const Keypoint& ka = a[m.index_a].keypoint;
    const Keypoint& kb = b[m.index_b].keypoint;
    pairs.push_back({{ka.x, ka.y}, {kb.x, kb.y}});
  }
  return pairs;
}

// Pure-translation consensus: each pair's displacement is a hypothesis; the
// one agreeing with the most pairs (lowest index on ties) wins.
std::vector<PointPair> TranslationConsensus(const std::vector<PointPair>& pairs,
                                            double threshold) {
  std::size_t best_count = 0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double tx = pairs[i].p2.x - pairs[i].p1.x;
    const double ty = pairs[i].p2.y - pairs[i].p1.y;
    std::size_t count = 0;
    for (const auto& pr : pairs) {
      if (std::hypot(pr.p2.x - pr.p1.x - tx, pr.p2.y - pr.p1.y - ty) < threshold) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_index = i;
    }
  }
  std::vector<PointPair> consensus;
  if (pairs.empty()) return consensus;
  const double tx = pairs[best_index].p2.x - pairs[best_index].p1.x;
  const double ty = pairs[best_index].p2.y - pairs[best_index].p1.y;
  for (const auto& pr : pairs) {
    if (std::hypot(pr.p2.x - pr.p1.x - tx, pr.p2.y - pr.p1.y - ty) < threshold) {
      consensus.push_back(pr);
    }
  }
  return consensus;
}

Image MatchChannels(const Image& img, int channels) {
  return channels == 3 ? ToRgb(img) : img;
}

}  // namespace

StitchResult StitchPair(const Image& d1, const Image& d2, const RansacConfig& cfg) {
  StitchOptions options;
  options.ransac = cfg;
  return StitchPair(d1, d2, options);
}

StitchResult StitchPair(const Image& d1, const Image& d2, const StitchOptions& options,
                        const Image* d1_coverage) {
  options.ransac.Validate();
  if (d1.width() < kMinSide || d1.height() < kMinSide || d2.width() < kMinSide ||
      d2.height() < kMinSide) {
    throw Error(ErrorCode::kInvalidParameter, "stitching needs drawings of at least 64x64");
  }
  const OrbConfig orb{options.max_features};
  const Image g1 = ToGrayscale(d1);
  const Image g2 = ToGrayscale(d2);

  // (1) match the two drawings.
  std::vector<Feature> f1 = DetectAndDescribe(g1, orb);
  if (d1_coverage != nullptr) f1 = KeepCovered(std::move(f1), *d1_coverage, orb.scale_factor);
  const std::vector<Feature> f2 = DetectAndDescribe(g2, orb);
  const std::vector<Match> stage1 = MatchFeatures(Descriptors(f1), Descriptors(f2));

  StitchResult result;
  result.stage1_matches = static_cast<int>(stage1.size());

  // (2) homography drawing 1 -> drawing 2, warp drawing 1.
  RansacResult ransac;
  try {
    ransac = RansacHomography(ToPairs(stage1, f1, f2), options.ransac);
  } catch (const Error& e) {
    throw StitchFailure(std::string("homography stage failed: ") + e.what(),
                        result.stage1_matches, 0);
  }
  result.homography = ransac.homography;
  result.ransac_inliers = static_cast<int>(ransac.inliers.size());
  result.inlier_ratio = result.stage1_matches > 0
                            ? static_cast<double>(result.ransac_inliers) / result.stage1_matches
                            : 0.0;
  WarpResult warped;
  try {
    warped = WarpImage(g1, ransac.homography, d1_coverage);
  } catch (const Error& e) {
    throw StitchFailure(std::string("warp failed: ") + e.what(), result.stage1_matches, 0, 0,
                        result.ransac_inliers);
  }

  // (3) re-detect on the warped raster and match against drawing 2.
  std::vector<Feature> fw =
      KeepCovered(DetectAndDescribe(warped.image, orb), warped.coverage, orb.scale_factor);
  const std::vector<Match> stage2 = MatchFeatures(Descriptors(fw), Descriptors(f2));
  result.stage2_matches = static_cast<int>(stage2.size());
  if (result.stage2_matches < kMinTranslationMatches) {
    throw StitchFailure("too few matches on the warped drawing", result.stage1_matches,
                        result.stage2_matches, 0, result.ransac_inliers);
  }

  // (4) mean translation over the translation-consistent matches.
  const std::vector<PointPair> consensus =
      TranslationConsensus(ToPairs(stage2, fw, f2), options.ransac.inlier_threshold);
  result.translation_inliers = static_cast<int>(consensus.size());
  if (result.translation_inliers < kMinTranslationMatches) {
    throw StitchFailure("no consistent translation between warped drawing 1 and drawing 2",
                        result.stage1_matches, result.stage2_matches, 0, result.ransac_inliers);
  }
  result.translation = MeanTranslation(consensus);
  result.composite =
      Homography::Translation(result.translation.x - warped.offset_x,
                              result.translation.y - warped.offset_y)
          .Compose(ransac.homography);

  // Drawing 2 pixel v lands on warped-raster pixel v - t.
  const int place_x = static_cast<int>(std::lround(-result.translation.x));
  const int place_y = static_cast<int>(std::lround(-result.translation.y));
  const int min_x = std::min(0, place_x);
  const int min_y = std::min(0, place_y);
  const int max_x = std::max(warped.image.width(), place_x + d2.width());
  const int max_y = std::max(warped.image.height(), place_y + d2.height());
  const int channels = std::max(d1.channels(), d2.channels());

  const Image warped_color =
      MatchChannels(d1.channels() == 3 ? WarpImage(d1, ransac.homography, d1_coverage).image
                                       : warped.image,
                    channels);
  const Image top = MatchChannels(d2, channels);
  result.canvas = Image(max_x - min_x, max_y - min_y, channels, 255);
  result.coverage = Image(max_x - min_x, max_y - min_y, 1, 0);
  result.warped_origin_x = -min_x;
  result.warped_origin_y = -min_y;
  result.d2_origin_x = place_x - min_x;
  result.d2_origin_y = place_y - min_y;
  for (int y = 0; y < warped_color.height(); ++y) {
    for (int x = 0; x < warped_color.width(); ++x) {
      if (warped.coverage.at(x, y) == 0) continue;
      const int cx = x + result.warped_origin_x;
      const int cy = y + result.warped_origin_y;
      for (int c = 0; c < channels; ++c) result.canvas.at(cx, cy, c) = warped_color.at(x, y, c);
      result.coverage.at(cx, cy) = 255;
    }
  }
  for (int y = 0; y < top.height(); ++y) {
    for (int x = 0; x < top.width(); ++x) {
      const int cx = x + result.d2_origin_x;
      const int cy = y + result.d2_origin_y;
      for (int c = 0; c < channels; ++c) result.canvas.at(cx, cy, c) = top.at(x, y, c);
      result.coverage.at(cx, cy) = 255;
    }
  }
  return result;
}

StitchManyResult StitchMany(const std::vector<Image>& drawings, const RansacConfig& cfg) {
  StitchOptions options;
  options.ransac = cfg;
  return StitchMany(drawings, options);
}

StitchManyResult StitchMany(const std::vector<Image>& drawings, const StitchOptions& options) {
  if (drawings.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "stitching needs at least two drawings");
  }
  StitchManyResult out;
  Image canvas = drawings[0];
  Image coverage;
  for (std::size_t k = 1; k < drawings.size(); ++k) {
    try {
      StitchResult step =
          StitchPair(canvas, drawings[k], options, k == 1 ? nullptr : &coverage);
      canvas = step.canvas;
      coverage = step.coverage;
      out.steps.push_back(std::move(step));
    } catch (const StitchFailure& e) {
      throw StitchFailure("step " + std::to_string(k) + ": " + e.what(), e.stage1_matches(),
                          e.stage2_matches(), static_cast<int>(k), e.ransac_inliers());
    }
  }
  out.final = out.steps.back();
  return out;
}

}  // namespace sketch3d
