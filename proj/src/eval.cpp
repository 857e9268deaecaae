#include "sketch3d/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "sketch3d/error.hpp"
#include "sketch3d/random.hpp"

namespace sketch3d {
namespace {

// Antialiased stroke rendering on a float canvas (255 = paper).
class StrokeCanvas {
 public:
  StrokeCanvas(int width, int height)
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * height, 255.0) {}

  void Line(double x0, double y0, double x1, double y1, double thickness) {
    const double half = thickness / 2.0;
    const int bx0 = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - half - 1)));
    const int by0 = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - half - 1)));
    const int bx1 = std::min(width_ - 1, static_cast<int>(std::ceil(std::max(x0, x1) + half + 1)));
    const int by1 = std::min(height_ - 1, static_cast<int>(std::ceil(std::max(y0, y1) + half + 1)));
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    for (int y = by0; y <= by1; ++y) {
      for (int x = bx0; x <= bx1; ++x) {
        double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = std::hypot(x - (x0 + t * dx), y - (y0 + t * dy));
        const double ink = std::clamp(half + 0.5 - d, 0.0, 1.0);
        double& px = pixels_[static_cast<std::size_t>(y) * width_ + x];
        px = std::min(px, 255.0 * (1.0 - ink));
      }
    }
  }

  void Rect(double x, double y, double w, double h, double thickness) {
    Line(x, y, x + w, y, thickness);
    Line(x + w, y, x + w, y + h, thickness);
    Line(x + w, y + h, x, y + h, thickness);
    Line(x, y + h, x, y, thickness);
  }

  void Arc(double cx, double cy, double r, double a0, double a1, double thickness) {
    const int steps = std::max(8, static_cast<int>(r * std::abs(a1 - a0) / 3.0));
    for (int i = 0; i < steps; ++i) {
      const double t0 = a0 + (a1 - a0) * i / steps;
      const double t1 = a0 + (a1 - a0) * (i + 1) / steps;
      Line(cx + r * std::cos(t0), cy + r * std::sin(t0), cx + r * std::cos(t1),
           cy + r * std::sin(t1), thickness);
    }
  }

  Image ToImage() const {
    Image out(width_, height_, 1);
    for (std::size_t i = 0; i < pixels_.size(); ++i) out.data()[i] = QuantizeToByte(pixels_[i]);
    return out;
  }

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

void DrawBuilding(StrokeCanvas& canvas, Rng& rng, double x, double ground, double w, double h) {
  const double stroke = rng.Uniform(1.6, 2.6);
  const double top = ground - h;
  canvas.Rect(x, top, w, h, stroke);
  // Roof: gable, flat with parapet, or stepped.
  const int roof = static_cast<int>(rng.Index(3));
  if (roof == 0) {
    const double peak = rng.Uniform(0.3, 0.7);
    const double rise = rng.Uniform(0.2, 0.6) * w;
    canvas.Line(x, top, x + peak * w, top - rise, stroke);
    canvas.Line(x + peak * w, top - rise, x + w, top, stroke);
    if (rng.Uniform() < 0.6) {
      const double cw = rng.Uniform(6, 12);
      const double cx = x + rng.Uniform(0.15, 0.75) * w;
      canvas.Rect(cx, top - rise * 0.8, cw, rise * 0.6, stroke * 0.8);
    }
  } else if (roof == 1) {
    const double p = rng.Uniform(4, 10);
    canvas.Rect(x - 3, top - p, w + 6, p, stroke);
  } else {
    const double sw = rng.Uniform(0.3, 0.6) * w;
    const double sh = rng.Uniform(10, 30);
    const double sx = x + rng.Uniform(0.05, 0.95) * (w - sw);
    canvas.Rect(sx, top - sh, sw, sh, stroke);
  }
  // Windows on a jittered grid.
  const int cols = std::max(1, static_cast<int>(w / rng.Uniform(18, 30)));
  const int rows = std::max(1, static_cast<int>((h - 30) / rng.Uniform(20, 34)));
  const double cell_w = w / cols;
  const double cell_h = (h - 30) / rows;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (rng.Uniform() < 0.25) continue;
      const double ww = cell_w * rng.Uniform(0.35, 0.7);
      const double wh = cell_h * rng.Uniform(0.4, 0.75);
      const double wx = x + c * cell_w + rng.Uniform(0.1, 0.9) * (cell_w - ww);
      const double wy = top + 6 + r * cell_h + rng.Uniform(0.1, 0.9) * (cell_h - wh);
      canvas.Rect(wx, wy, ww, wh, stroke * 0.8);
      const double style = rng.Uniform();
      if (style < 0.3) {
        canvas.Line(wx + ww / 2, wy, wx + ww / 2, wy + wh, stroke * 0.6);
      } else if (style < 0.5) {
        canvas.Line(wx, wy + wh / 2, wx + ww, wy + wh / 2, stroke * 0.6);
      } else if (style < 0.65) {
        canvas.Arc(wx + ww / 2, wy, ww / 2, std::numbers::pi, 2 * std::numbers::pi, stroke * 0.6);
      }
    }
  }
  const double dw = rng.Uniform(10, 18);
  const double dh = rng.Uniform(18, 28);
  const double dx = x + rng.Uniform(0.1, 0.9) * (w - dw);
  canvas.Rect(dx, ground - dh, dw, dh, stroke);
}

}  // namespace

int ToyPieceWidth(int width, double overlap_fraction) {
  return static_cast<int>(std::lround((1.0 + overlap_fraction) / 2.0 * width));
}

ToyPair MakeToyPair(const Image& sketch, double overlap_fraction, double max_corner_shift,
                    std::uint64_t seed) {
  return MakeToyPair(sketch, sketch, overlap_fraction, max_corner_shift, seed);
}

ToyPair MakeToyPair(const Image& left_source, const Image& right_source,
                    double overlap_fraction, double max_corner_shift, std::uint64_t seed) {
  if (!(overlap_fraction >= 0.2 && overlap_fraction <= 0.8)) {
    throw Error(ErrorCode::kInvalidParameter, "overlap fraction must be in [0.2, 0.8]");
  }
  if (!(max_corner_shift >= 0.0 && max_corner_shift <= 0.15)) {
    throw Error(ErrorCode::kInvalidParameter, "max corner shift must be in [0, 0.15]");
  }
  if (left_source.width() < 128) {
    throw Error(ErrorCode::kInvalidParameter, "toy pairs need a sketch at least 128 px wide");
  }
  if (left_source.width() != right_source.width() ||
      left_source.height() != right_source.height()) {
    throw Error(ErrorCode::kInvalidParameter, "left and right renderings differ in size");
  }
  const int width = left_source.width();
  const int height = left_source.height();
  const int piece = ToyPieceWidth(width, overlap_fraction);
  const int right_x = width - piece;

  ToyPair pair;
  pair.overlap_fraction = overlap_fraction;
  pair.max_corner_shift = max_corner_shift;
  pair.seed = seed;
  pair.source_width = width;
  pair.piece_width = piece;
  pair.left = Crop(left_source, 0, 0, piece, height);
  const Image right_piece = Crop(right_source, right_x, 0, piece, height);

  Rng rng(seed);
  const double limit = max_corner_shift * width;
  const Point2 corners[4] = {{0, 0},
                             {piece - 1.0, 0},
                             {piece - 1.0, height - 1.0},
                             {0, height - 1.0}};
  std::vector<PointPair> correspondences;
  for (const auto& c : corners) {
    const double dx = rng.Uniform(-limit, limit);
    const double dy = rng.Uniform(-limit, limit);
    correspondences.push_back({c, {c.x + dx, c.y + dy}});
  }
  const Homography warp = max_corner_shift == 0.0 ? Homography::Identity()
                                                  : Dlt(correspondences);
  WarpResult warped = WarpImage(right_piece, warp);
  pair.right = std::move(warped.image);
  pair.right_coverage = std::move(warped.coverage);
  pair.true_h = Homography::Translation(right_x, 0)
                    .Compose(warp.Inverse())
                    .Compose(Homography::Translation(warped.offset_x, warped.offset_y));
  return pair;
}

std::vector<Point2> OverlapCornersInRight(const ToyPair& pair) {
  const double x0 = pair.source_width - pair.piece_width;
  const double x1 = pair.piece_width - 1.0;
  const double y1 = pair.left.height() - 1.0;
  const Homography to_right = pair.true_h.Inverse();
  std::vector<Point2> out;
  for (const Point2& c : {Point2{x0, 0}, Point2{x1, 0}, Point2{x1, y1}, Point2{x0, y1}}) {
    out.push_back(to_right.Apply(c));
  }
  return out;
}

MatchReport EvaluateStitch(const ToyPair& pair, const RansacConfig& cfg) {
  StitchOptions options;
  options.ransac = cfg;
  return EvaluateStitch(pair, options);
}

MatchReport EvaluateStitch(const ToyPair& pair, const StitchOptions& options) {
  MatchReport report;
  try {
    const StitchResult result = StitchPair(pair.right, pair.left, options, &pair.right_coverage);
    report.stage1_matches = result.stage1_matches;
    report.stage2_matches = result.stage2_matches;
    report.ransac_inliers = result.ransac_inliers;
    report.inlier_ratio = result.inlier_ratio;
    double sum = 0.0;
    const std::vector<Point2> corners = OverlapCornersInRight(pair);
    for (const auto& c : corners) {
      const Point2 truth = pair.true_h.Apply(c);
      const Point2 est = result.composite.Apply(c);
      sum += (truth.x - est.x) * (truth.x - est.x) + (truth.y - est.y) * (truth.y - est.y);
    }
    report.corner_rmse = std::sqrt(sum / corners.size());
    report.success = true;
  } catch (const StitchFailure& e) {
    report.stage1_matches = e.stage1_matches();
    report.stage2_matches = e.stage2_matches();
    report.ransac_inliers = e.ransac_inliers();
    report.inlier_ratio = e.stage1_matches() > 0
                              ? static_cast<double>(e.ransac_inliers()) / e.stage1_matches()
                              : 0.0;
    report.failure = e.what();
  } catch (const Error& e) {
    // A composite that sends an overlap corner to infinity is also a failure.
    report.failure = e.what();
  }
  return report;
}

SketchParams PerturbStyle(const SketchParams& base, double k) {
  SketchParams p = base;
  p.blur_sigma = base.blur_sigma * (1.0 + 2.0 * k);
  p.highpass_sigma = base.highpass_sigma * (1.0 + k);
  return p;
}

Image SyntheticDrawing(int width, int height, std::uint64_t seed) {
  if (width < 64 || height < 64) {
    throw Error(ErrorCode::kInvalidParameter, "synthetic drawing must be at least 64x64");
  }
  Rng rng(seed);
  StrokeCanvas canvas(width, height);
  const double ground = height * rng.Uniform(0.82, 0.9);
  canvas.Line(0, ground, width - 1, ground, 2.0);
  double x = rng.Uniform(4, 16);
  while (x < width - 30) {
    const double w = std::min(rng.Uniform(50, 110), width - 8 - x);
    if (w < 30) break;
    const double h = rng.Uniform(0.35, 0.65) * height;
    DrawBuilding(canvas, rng, x, ground, w, h);
    x += w + rng.Uniform(-6, 14);
  }
  // Trees, clouds and kerb scribbles.
  const int extras = static_cast<int>(width / 64);
  for (int i = 0; i < extras; ++i) {
    const double cx = rng.Uniform(10, width - 10);
    const double r = rng.Uniform(6, 14);
    canvas.Arc(cx, rng.Uniform(8, height * 0.2), r, 0, std::numbers::pi * rng.Uniform(1.0, 2.0),
               1.4);
    double px = rng.Uniform(0, width - 1);
    double py = ground + rng.Uniform(4, height - ground - 4);
    const int turns = 2 + static_cast<int>(rng.Index(4));
    for (int t = 0; t < turns; ++t) {
      const double nx = std::clamp(px + rng.Uniform(-30, 30), 0.0, width - 1.0);
      const double ny = std::clamp(py + rng.Uniform(-8, 8), ground + 2, height - 2.0);
      canvas.Line(px, py, nx, ny, 1.5);
      px = nx;
      py = ny;
    }
  }
  return canvas.ToImage();
}

std::vector<SweepRow> Sweep(const Image& source, const SweepGrid& grid, const SketchParams& base,
                            const StitchOptions& options) {
  if (grid.overlaps.empty() || grid.corner_shifts.empty() || grid.style_perturbations.empty() ||
      grid.seeds.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "sweep grid has an empty axis");
  }
  const Image left_render = Sketchify(source, base);
  std::map<double, Image> right_renders;
  std::vector<SweepRow> rows;
  int cell = 0;
  for (double overlap : grid.overlaps) {
    for (double shift : grid.corner_shifts) {
      for (double style : grid.style_perturbations) {
        auto it = right_renders.find(style);
        if (it == right_renders.end()) {
          it = right_renders
                   .emplace(style, style == 0.0 ? left_render
                                                : Sketchify(source, PerturbStyle(base, style)))
                   .first;
        }
        for (std::uint64_t seed : grid.seeds) {
          const ToyPair pair = MakeToyPair(left_render, it->second, overlap, shift, seed);
          rows.push_back({cell, overlap, shift, style, seed, EvaluateStitch(pair, options)});
        }
        ++cell;
      }
    }
  }
  return rows;
}

std::string SweepCsvHeader() {
  return "cell,overlap,corner_shift,style_perturbation,seed,success,stage1_matches,"
         "stage2_matches,ransac_inliers,inlier_ratio,corner_rmse,orientation";
}

std::string ToCsvLine(const SweepRow& row) {
  char buf[512];
  std::string rmse;
  if (row.report.corner_rmse) {
    char r[64];
    std::snprintf(r, sizeof(r), "%.6f", *row.report.corner_rmse);
    rmse = r;
  }
  std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g,%.6g,%llu,%d,%d,%d,%d,%.6f,%s,%s", row.cell,
                row.overlap, row.corner_shift, row.style_perturbation,
                static_cast<unsigned long long>(row.seed), row.report.success ? 1 : 0,
                row.report.stage1_matches, row.report.stage2_matches, row.report.ransac_inliers,
                row.report.inlier_ratio, rmse.c_str(), row.report.orientation.c_str());
  return buf;
}

std::string ToCsv(const std::vector<SweepRow>& rows) {
  std::string out = SweepCsvHeader() + "\n";
  for (const auto& r : rows) out += ToCsvLine(r) + "\n";
  return out;
}

}  // namespace sketch3d
