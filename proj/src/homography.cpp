#include "sketch3d/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "sketch3d/error.hpp"
#include "sketch3d/random.hpp"

namespace sketch3d {
namespace {

constexpr double kDetEpsilon = 1e-12;
constexpr double kInfinityEpsilon = 1e-12;
constexpr double kRankTolerance = 1e-10;
constexpr long long kMaxWarpPixels = 64LL * 1024 * 1024;

bool Finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Translate the centroid to the origin and scale the mean radius to sqrt(2).
Eigen::Matrix3d NormalizingTransform(const std::vector<Point2>& pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= pts.size();
  cy /= pts.size();
  double mean_r = 0.0;
  for (const auto& p : pts) mean_r += std::hypot(p.x - cx, p.y - cy);
  mean_r /= pts.size();
  if (!(mean_r > 0.0)) {
    throw Error(ErrorCode::kDegenerateGeometry, "all points coincide");
  }
  const double s = std::sqrt(2.0) / mean_r;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx,
       0, s, -s * cy,
       0, 0, 1;
  return t;
}

Point2 Transform(const Eigen::Matrix3d& m, const Point2& p) {
  const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
  return {(m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2)) / w,
          (m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)) / w};
}

double Cross(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Rejects minimal samples with three (nearly) collinear points on either side.
bool SampleIsDegenerate(const std::vector<PointPair>& pairs, const std::array<int, 4>& idx) {
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples) {
    const auto& a = pairs[idx[t[0]]];
    const auto& b = pairs[idx[t[1]]];
    const auto& c = pairs[idx[t[2]]];
    if (std::abs(Cross(a.p1, b.p1, c.p1)) < 1e-6 ||
        std::abs(Cross(a.p2, b.p2, c.p2)) < 1e-6) {
      return true;
    }
  }
  return false;
}

std::vector<int> CollectInliers(const std::vector<PointPair>& pairs, const Homography& h,
                                double threshold) {
  const Homography h_inv = h.Inverse();
  std::vector<int> inliers;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (SymmetricTransferError(h, h_inv, pairs[i]) < threshold) {
      inliers.push_back(static_cast<int>(i));
    }
  }
  return inliers;
}

int RequiredIterations(std::size_t inliers, std::size_t total, double confidence, int cap) {
  if (confidence >= 1.0) return cap;
  const double w = static_cast<double>(inliers) / total;
  const double p_good = std::pow(w, 4);
  if (p_good <= 0.0) return cap;
  if (p_good >= 1.0) return 1;
  const double n = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  if (!std::isfinite(n) || n >= cap) return cap;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

}  // namespace

Eigen::Matrix3d Canonicalize(const Eigen::Matrix3d& m) {
  const double norm = m.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kDegenerateGeometry, "homography has zero or non-finite norm");
  }
  Eigen::Matrix3d out = m / norm;
  for (int k = 8; k >= 0; --k) {
    const double v = out(k / 3, k % 3);
    if (std::abs(v) > 1e-12) {
      if (v < 0.0) out = -out;
      break;
    }
  }
  return out;
}

Homography::Homography(const Eigen::Matrix3d& m) : m_(m) { Canonicalize(); }

void Homography::Canonicalize() {
  m_ = sketch3d::Canonicalize(m_);
  if (!(std::abs(m_.determinant()) > kDetEpsilon)) {
    throw Error(ErrorCode::kDegenerateGeometry, "homography is not invertible");
  }
}

Homography Homography::Translation(double dx, double dy) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = dx;
  m(1, 2) = dy;
  return Homography(m);
}

Homography Homography::Inverse() const { return Homography(m_.inverse()); }

Homography Homography::Compose(const Homography& other) const {
  return Homography(m_ * other.m_);
}

Point2 Homography::Apply(const Point2& p) const {
  const double w = m_(2, 0) * p.x + m_(2, 1) * p.y + m_(2, 2);
  if (!(std::abs(w) > kInfinityEpsilon)) {
    throw Error(ErrorCode::kAtInfinity, "point maps to infinity");
  }
  return {(m_(0, 0) * p.x + m_(0, 1) * p.y + m_(0, 2)) / w,
          (m_(1, 0) * p.x + m_(1, 1) * p.y + m_(1, 2)) / w};
}

double CanonicalDistance(const Homography& a, const Homography& b) {
  return (a.matrix() - b.matrix()).norm();
}

void RansacConfig::Validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorCode::kInvalidParameter, "max_iterations must be >= 1");
  }
  if (!(inlier_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "inlier_threshold must be > 0");
  }
  if (min_inliers < 4) {
    throw Error(ErrorCode::kInvalidParameter, "min_inliers must be >= 4");
  }
  if (!(confidence > 0.0 && confidence <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "confidence must be in (0, 1]");
  }
}

Homography Dlt(const std::vector<PointPair>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 4) {
    throw Error(ErrorCode::kInsufficientData,
                "homography needs >= 4 correspondences, got " + std::to_string(n));
  }
  std::vector<Point2> src, dst;
  src.reserve(n);
  dst.reserve(n);
  for (const auto& pr : pairs) {
    if (!Finite(pr.p1) || !Finite(pr.p2)) {
      throw Error(ErrorCode::kInvalidParameter, "non-finite correspondence");
    }
    src.push_back(pr.p1);
    dst.push_back(pr.p2);
  }
  const Eigen::Matrix3d t1 = NormalizingTransform(src);
  const Eigen::Matrix3d t2 = NormalizingTransform(dst);

  const Eigen::Index rows = std::max<Eigen::Index>(9, static_cast<Eigen::Index>(2 * n));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = Transform(t1, src[i]);
    const Point2 q = Transform(t2, dst[i]);
    const Eigen::Index r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -p.x, -p.y, -1, 0, 0, 0, q.x * p.x, q.x * p.y, q.x;
    a.row(r + 1) << 0, 0, 0, -p.x, -p.y, -1, q.y * p.x, q.y * p.y, q.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv(7) > kRankTolerance * sv(0))) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "correspondences do not determine a homography (rank < 8)");
  }
  if (!(sv(7) - sv(8) > 1e-12 * sv(0))) {
    throw Error(ErrorCode::kDegenerateGeometry, "smallest singular value is not unique");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(t2.inverse() * hn * t1);
}

double SymmetricTransferError(const Homography& h, const Homography& h_inv,
                              const PointPair& pair) {
  const Eigen::Matrix3d& f = h.matrix();
  const Eigen::Matrix3d& b = h_inv.matrix();
  const double wf = f(2, 0) * pair.p1.x + f(2, 1) * pair.p1.y + f(2, 2);
  const double wb = b(2, 0) * pair.p2.x + b(2, 1) * pair.p2.y + b(2, 2);
  if (!(std::abs(wf) > kInfinityEpsilon) || !(std::abs(wb) > kInfinityEpsilon)) {
    return std::numeric_limits<double>::infinity();
  }
  const Point2 fwd = Transform(f, pair.p1);
  const Point2 bwd = Transform(b, pair.p2);
  const double ef = (fwd.x - pair.p2.x) * (fwd.x - pair.p2.x) + (fwd.y - pair.p2.y) * (fwd.y - pair.p2.y);
  const double eb = (bwd.x - pair.p1.x) * (bwd.x - pair.p1.x) + (bwd.y - pair.p1.y) * (bwd.y - pair.p1.y);
  return std::sqrt(ef + eb);
}

RansacResult RansacHomography(const std::vector<PointPair>& pairs, const RansacConfig& cfg) {
  cfg.Validate();
  const std::size_t n = pairs.size();
  if (n < 4) {
    throw Error(ErrorCode::kInsufficientData,
                "RANSAC needs >= 4 correspondences, got " + std::to_string(n));
  }
  Rng rng(cfg.seed);
  RansacResult best;
  bool have_model = false;
  int needed = cfg.max_iterations;
  int it = 0;
  for (; it < cfg.max_iterations && it < needed; ++it) {
    std::array<int, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      while (true) {
        const int candidate = static_cast<int>(rng.Index(n));
        if (std::find(idx.begin(), idx.begin() + k, candidate) == idx.begin() + k) {
          idx[k] = candidate;
          break;
        }
      }
    }
    if (SampleIsDegenerate(pairs, idx)) continue;
    std::vector<PointPair> sample;
    for (int k : idx) sample.push_back(pairs[k]);
    Homography model;
    std::vector<int> inliers;
    try {
      model = Dlt(sample);
      inliers = CollectInliers(pairs, model, cfg.inlier_threshold);
    } catch (const Error&) {
      continue;
    }
    if (!have_model || inliers.size() > best.inliers.size()) {
      have_model = true;
      best.homography = model;
      best.inliers = std::move(inliers);
      needed = RequiredIterations(best.inliers.size(), n, cfg.confidence, cfg.max_iterations);
    }
  }
  best.iterations = it;
  if (!have_model || static_cast<int>(best.inliers.size()) < cfg.min_inliers) {
    throw Error(ErrorCode::kNoConsensus,
                "best consensus " + std::to_string(have_model ? best.inliers.size() : 0) +
                    " < min_inliers " + std::to_string(cfg.min_inliers));
  }

  // Refit on the consensus set until it stops changing; a refit is kept only
  // if it does not shrink the set.
  for (int round = 0; round < 10; ++round) {
    std::vector<PointPair> support;
    support.reserve(best.inliers.size());
    for (int i : best.inliers) support.push_back(pairs[i]);
    Homography refit;
    std::vector<int> inliers;
    try {
      refit = Dlt(support);
      inliers = CollectInliers(pairs, refit, cfg.inlier_threshold);
    } catch (const Error&) {
      break;
    }
    if (inliers.size() < best.inliers.size()) break;
    const bool stable = inliers == best.inliers;
    best.homography = refit;
    best.inliers = std::move(inliers);
    if (stable) break;
  }
  return best;
}

WarpResult WarpImage(const Image& img, const Homography& h, const Image* source_coverage) {
  if (source_coverage != nullptr &&
      (source_coverage->width() != img.width() || source_coverage->height() != img.height() ||
       source_coverage->channels() != 1)) {
    throw Error(ErrorCode::kInvalidParameter, "coverage mask must match the source image");
  }
  const Eigen::Matrix3d& m = h.matrix();
  const double w_max = img.width() - 1;
  const double h_max = img.height() - 1;
  const Point2 corners[4] = {{0, 0}, {w_max, 0}, {w_max, h_max}, {0, h_max}};
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  int sign = 0;
  for (const auto& c : corners) {
    const double w = m(2, 0) * c.x + m(2, 1) * c.y + m(2, 2);
    const int s = w > kInfinityEpsilon ? 1 : (w < -kInfinityEpsilon ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw Error(ErrorCode::kDegenerateGeometry, "warp sends part of the image to infinity");
    }
    sign = s;
    const Point2 p = Transform(m, c);
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  // Snap to integers within rounding noise so exact maps keep their size.
  auto floor_snap = [](double v) { return std::floor(v + 1e-9); };
  auto ceil_snap = [](double v) { return std::ceil(v - 1e-9); };
  const double x0 = floor_snap(min_x), y0 = floor_snap(min_y);
  const double x1 = ceil_snap(max_x), y1 = ceil_snap(max_y);
  const double out_w = x1 - x0 + 1;
  const double out_h = y1 - y0 + 1;
  if (!(out_w * out_h <= static_cast<double>(kMaxWarpPixels))) {
    throw Error(ErrorCode::kDegenerateGeometry, "warped canvas is unreasonably large");
  }

  WarpResult result;
  result.offset_x = static_cast<int>(x0);
  result.offset_y = static_cast<int>(y0);
  result.image = Image(static_cast<int>(out_w), static_cast<int>(out_h), img.channels(), 255);
  result.coverage = Image(static_cast<int>(out_w), static_cast<int>(out_h), 1, 0);
  const Eigen::Matrix3d inv = m.inverse();
  constexpr double kEdgeTolerance = 1e-6;
  for (int y = 0; y < result.image.height(); ++y) {
    const double qy = y + y0;
    for (int x = 0; x < result.image.width(); ++x) {
      const double qx = x + x0;
      const double w = inv(2, 0) * qx + inv(2, 1) * qy + inv(2, 2);
      if (!(std::abs(w) > kInfinityEpsilon)) continue;
      const double sx = (inv(0, 0) * qx + inv(0, 1) * qy + inv(0, 2)) / w;
      const double sy = (inv(1, 0) * qx + inv(1, 1) * qy + inv(1, 2)) / w;
      if (sx < -kEdgeTolerance || sy < -kEdgeTolerance || sx > w_max + kEdgeTolerance ||
          sy > h_max + kEdgeTolerance) {
        continue;
      }
      if (source_coverage != nullptr && SampleBilinear(*source_coverage, sx, sy) < 127.5) {
        continue;
      }
      for (int c = 0; c < img.channels(); ++c) {
        result.image.at(x, y, c) = QuantizeToByte(SampleBilinear(img, sx, sy, c));
      }
      result.coverage.at(x, y) = 255;
    }
  }
  return result;
}

Point2 MeanTranslation(const std::vector<PointPair>& pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kInsufficientData, "mean translation of an empty set");
  }
  double dx = 0.0, dy = 0.0;
  for (const auto& pr : pairs) {
    dx += pr.p2.x - pr.p1.x;
    dy += pr.p2.y - pr.p1.y;
  }
  return {dx / pairs.size(), dy / pairs.size()};
}

}  // namespace sketch3d
