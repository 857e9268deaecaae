#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sketch3d/image.hpp"

namespace sketch3d {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct PointPair {
  Point2 p1;
  Point2 p2;
};

// 3x3 projective map kept in canonical form: unit Frobenius norm and the
// last nonzero entry (row-major) positive.
class Homography {
 public:
  Homography() : m_(Eigen::Matrix3d::Identity()) { Canonicalize(); }
  explicit Homography(const Eigen::Matrix3d& m);

  static Homography Identity() { return Homography(); }
  static Homography Translation(double dx, double dy);

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Homography Inverse() const;
  // this * other: apply `other` first.
  Homography Compose(const Homography& other) const;

  // Throws at-infinity when the image point has |w| <= 1e-12.
  Point2 Apply(const Point2& p) const;

 private:
  void Canonicalize();

  Eigen::Matrix3d m_;
};

Eigen::Matrix3d Canonicalize(const Eigen::Matrix3d& m);

// Frobenius distance between canonical forms.
double CanonicalDistance(const Homography& a, const Homography& b);

struct RansacConfig {
  int max_iterations = 2000;
  // Pixels, applied to the symmetric transfer error.
  double inlier_threshold = 3.0;
  int min_inliers = 10;
  std::uint64_t seed = 0;
  // Early exit once this probability of having drawn an all-inlier sample
  // is reached; 1.0 runs every iteration.
  double confidence = 0.999;

  void Validate() const;
};

struct RansacResult {
  Homography homography;
  std::vector<int> inliers;
  int iterations = 0;
};

// Normalized DLT over >= 4 correspondences mapping p1 -> p2.
Homography Dlt(const std::vector<PointPair>& pairs);

// sqrt(|p2 - H p1|^2 + |p1 - H^-1 p2|^2); +inf when a point maps to infinity.
double SymmetricTransferError(const Homography& h, const Homography& h_inv,
                              const PointPair& pair);

RansacResult RansacHomography(const std::vector<PointPair>& pairs,
                              const RansacConfig& cfg);

struct WarpResult {
  Image image;
  // 255 where the pixel was sampled from the source, 0 where it is fill.
  Image coverage;
  // Destination-frame position of the output's top-left pixel.
  int offset_x = 0;
  int offset_y = 0;
};

// Inverse-mapped bilinear warp onto the bounding box of the warped source.
// Pixels with no source are white. `source_coverage`, when given, marks which
// source pixels are valid (nonzero) and is warped alongside.
WarpResult WarpImage(const Image& img, const Homography& h,
                     const Image* source_coverage = nullptr);

// Component-wise mean of p2 - p1.
Point2 MeanTranslation(const std::vector<PointPair>& pairs);

}  // namespace sketch3d
