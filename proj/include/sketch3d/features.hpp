#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sketch3d/image.hpp"

namespace sketch3d {

struct Keypoint {
  // Level-0 subpixel coordinates.
  double x = 0.0;
  double y = 0.0;
  int scale_level = 0;
  // Radians in [0, 2*pi).
  double orientation = 0.0;
  // Harris corner response on the keypoint's pyramid level.
  double response = 0.0;
};

struct Descriptor {
  std::array<std::uint8_t, 32> bits{};

  bool operator==(const Descriptor&) const = default;
};

int HammingDistance(const Descriptor& a, const Descriptor& b);

std::string ToHex(const Descriptor& d);
Descriptor DescriptorFromHex(const std::string& hex);

struct Feature {
  Keypoint keypoint;
  Descriptor descriptor;
};

struct Match {
  int index_a = 0;
  int index_b = 0;
  int distance = 0;
};

struct OrbConfig {
  int max_features = 1000;
  int levels = 8;
  double scale_factor = 1.2;
  int fast_threshold = 20;
};

// Keypoints closer than this to a level's border are discarded.
inline constexpr int kOrbEdgeMargin = 19;
inline constexpr int kOrbPatchRadius = 15;

// Oriented FAST-9 corners over a scale pyramid, ranked by Harris response,
// described by 256 steered intensity comparisons. Output is ordered by level,
// then by descending response.
std::vector<Feature> DetectAndDescribe(const Image& gray, int max_features);
std::vector<Feature> DetectAndDescribe(const Image& gray, const OrbConfig& cfg);

// The fixed comparison pattern: 256 point pairs (x1, y1, x2, y2) inside a
// disc of radius 13 around the keypoint.
const std::vector<std::array<int, 4>>& OrbTestPattern();

// Ratio test (nearest < 0.75 * second nearest, strict) plus mutual-best
// cross-check. Sorted by ascending distance, then index_a.
std::vector<Match> MatchFeatures(const std::vector<Descriptor>& a,
                                 const std::vector<Descriptor>& b);

inline constexpr double kMatchRatio = 0.75;

std::vector<Descriptor> Descriptors(const std::vector<Feature>& features);

}  // namespace sketch3d
