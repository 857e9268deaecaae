#include "sketch3d/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "sketch3d/error.hpp"
#include "sketch3d/random.hpp"

namespace sketch3d {
namespace {

constexpr std::uint64_t kPatternSeed = 0x0b5eed5a17c0ffeeULL;
constexpr int kPatternRadius = 13;
constexpr double kPatternSigma = 31.0 / 5.0;
constexpr double kDescriptorSmoothSigma = 2.0;
constexpr double kHarrisK = 0.04;
constexpr int kHarrisBlock = 7;

constexpr std::array<std::array<int, 2>, 16> kCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

struct Candidate {
  int x = 0;
  int y = 0;
  double harris = 0.0;
};

// Largest min-difference over any contiguous arc of nine circle pixels, for
// brighter and darker arcs alike. A pixel is a FAST-9 corner iff this
// exceeds the threshold.
int FastScore(const Image& img, int x, int y) {
  const int center = img.at(x, y);
  std::array<int, 16> diff;
  for (int i = 0; i < 16; ++i) {
    diff[i] = img.at(x + kCircle[i][0], y + kCircle[i][1]) - center;
  }
  int best = 0;
  for (int start = 0; start < 16; ++start) {
    int min_bright = std::numeric_limits<int>::max();
    int min_dark = std::numeric_limits<int>::max();
    for (int k = 0; k < 9; ++k) {
      const int d = diff[(start + k) % 16];
      min_bright = std::min(min_bright, d);
      min_dark = std::min(min_dark, -d);
    }
    best = std::max({best, min_bright, min_dark});
  }
  return best;
}

bool PassesCompassTest(const Image& img, int x, int y, int threshold) {
  const int center = img.at(x, y);
  int bright = 0;
  int dark = 0;
  for (int i = 0; i < 16; i += 4) {
    const int v = img.at(x + kCircle[i][0], y + kCircle[i][1]);
    bright += v > center + threshold;
    dark += v < center - threshold;
  }
  return bright >= 2 || dark >= 2;
}

std::vector<Candidate> DetectFast(const Image& img, int threshold) {
  const int w = img.width();
  const int h = img.height();
  // FAST itself only needs 3 px; the wider band keeps descriptor patches
  // inside the raster.
  const int lo = kOrbEdgeMargin;
  std::vector<int> score(static_cast<std::size_t>(w) * h, 0);
  for (int y = lo; y < h - lo; ++y) {
    for (int x = lo; x < w - lo; ++x) {
      if (!PassesCompassTest(img, x, y, threshold)) continue;
      const int s = FastScore(img, x, y);
      if (s > threshold) score[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  std::vector<Candidate> out;
  for (int y = lo; y < h - lo; ++y) {
    for (int x = lo; x < w - lo; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const int s = score[idx];
      if (s == 0) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const std::size_t nidx = static_cast<std::size_t>(y + dy) * w + (x + dx);
          const int ns = score[nidx];
          // Plateaus keep their first pixel in raster order.
          if (ns > s || (ns == s && nidx < idx)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) out.push_back({x, y, 0.0});
    }
  }
  return out;
}

double HarrisResponse(const Image& img, int x, int y) {
  const int r = kHarrisBlock / 2;
  double a = 0.0, b = 0.0, c = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int px = x + dx;
      const int py = y + dy;
      auto I = [&](int ox, int oy) { return static_cast<double>(img.at(px + ox, py + oy)); };
      const double gx = (I(1, -1) + 2 * I(1, 0) + I(1, 1)) - (I(-1, -1) + 2 * I(-1, 0) + I(-1, 1));
      const double gy = (I(-1, 1) + 2 * I(0, 1) + I(1, 1)) - (I(-1, -1) + 2 * I(0, -1) + I(1, -1));
      a += gx * gx;
      b += gy * gy;
      c += gx * gy;
    }
  }
  // Normalized so responses are comparable in magnitude across images.
  const double scale = 1.0 / (4.0 * 255.0 * kHarrisBlock * kHarrisBlock);
  a *= scale;
  b *= scale;
  c *= scale;
  return a * b - c * c - kHarrisK * (a + b) * (a + b);
}

// Row half-widths of the circular orientation patch.
const std::vector<int>& PatchHalfWidths() {
  static const std::vector<int> widths = [] {
    std::vector<int> w(kOrbPatchRadius + 1);
    for (int dy = 0; dy <= kOrbPatchRadius; ++dy) {
      w[dy] = static_cast<int>(std::floor(
          std::sqrt(static_cast<double>(kOrbPatchRadius * kOrbPatchRadius - dy * dy)) + 1e-9));
    }
    return w;
  }();
  return widths;
}

double IntensityCentroidAngle(const Image& img, int x, int y) {
  const auto& half = PatchHalfWidths();
  double m10 = 0.0;
  double m01 = 0.0;
  for (int dy = -kOrbPatchRadius; dy <= kOrbPatchRadius; ++dy) {
    const int hw = half[std::abs(dy)];
    for (int dx = -hw; dx <= hw; ++dx) {
      const double v = img.at(x + dx, y + dy);
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  double angle = std::atan2(m01, m10);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  if (angle >= 2.0 * std::numbers::pi) angle = 0.0;
  return angle;
}

Descriptor SteeredDescriptor(const Image& smoothed, int x, int y, double angle) {
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  auto sample = [&](int px, int py) {
    const int rx = static_cast<int>(std::lround(cs * px - sn * py));
    const int ry = static_cast<int>(std::lround(sn * px + cs * py));
    return smoothed.at(x + rx, y + ry);
  };
  Descriptor d;
  const auto& pattern = OrbTestPattern();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const auto& t = pattern[i];
    if (sample(t[0], t[1]) < sample(t[2], t[3])) {
      d.bits[i / 8] = static_cast<std::uint8_t>(d.bits[i / 8] | (1u << (i % 8)));
    }
  }
  return d;
}

std::vector<int> LevelQuotas(int max_features, int levels, double scale_factor) {
  const double factor = 1.0 / scale_factor;
  std::vector<int> quotas(levels, 0);
  double per_level = max_features * (1.0 - factor) / (1.0 - std::pow(factor, levels));
  int assigned = 0;
  for (int l = 0; l < levels - 1; ++l) {
    quotas[l] = static_cast<int>(std::lround(per_level));
    assigned += quotas[l];
    per_level *= factor;
  }
  quotas[levels - 1] = std::max(0, max_features - assigned);
  return quotas;
}

}  // namespace

int HammingDistance(const Descriptor& a, const Descriptor& b) {
  int total = 0;
  for (int i = 0; i < 4; ++i) {
    std::uint64_t wa, wb;
    std::memcpy(&wa, a.bits.data() + 8 * i, 8);
    std::memcpy(&wb, b.bits.data() + 8 * i, 8);
    total += std::popcount(wa ^ wb);
  }
  return total;
}

std::string ToHex(const Descriptor& d) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t byte : d.bits) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

Descriptor DescriptorFromHex(const std::string& hex) {
  if (hex.size() != 64) {
    throw Error(ErrorCode::kInvalidParameter, "descriptor hex must be 64 characters");
  }
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw Error(ErrorCode::kInvalidParameter, "invalid hex digit in descriptor");
  };
  Descriptor d;
  for (int i = 0; i < 32; ++i) {
    d.bits[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return d;
}

const std::vector<std::array<int, 4>>& OrbTestPattern() {
  static const std::vector<std::array<int, 4>> pattern = [] {
    Rng rng(kPatternSeed);
    auto draw_point = [&rng]() {
      while (true) {
        const int x = static_cast<int>(std::lround(rng.Normal() * kPatternSigma));
        const int y = static_cast<int>(std::lround(rng.Normal() * kPatternSigma));
        if (x * x + y * y <= kPatternRadius * kPatternRadius) return std::array<int, 2>{x, y};
      }
    };
    std::vector<std::array<int, 4>> tests;
    tests.reserve(256);
    while (tests.size() < 256) {
      const auto p = draw_point();
      const auto q = draw_point();
      if (p == q) continue;
      tests.push_back({p[0], p[1], q[0], q[1]});
    }
    return tests;
  }();
  return pattern;
}

std::vector<Feature> DetectAndDescribe(const Image& gray, int max_features) {
  OrbConfig cfg;
  cfg.max_features = max_features;
  return DetectAndDescribe(gray, cfg);
}

std::vector<Feature> DetectAndDescribe(const Image& input, const OrbConfig& cfg) {
  if (cfg.max_features < 1) {
    throw Error(ErrorCode::kInvalidParameter, "max_features must be >= 1");
  }
  if (cfg.levels < 1 || !(cfg.scale_factor > 1.0) || cfg.fast_threshold < 0) {
    throw Error(ErrorCode::kInvalidParameter, "invalid ORB pyramid configuration");
  }
  const Image gray = ToGrayscale(input);
  const int min_side = 2 * kOrbEdgeMargin + 1;
  std::vector<Feature> out;
  if (gray.width() < min_side || gray.height() < min_side) return out;

  std::vector<Image> pyramid;
  pyramid.push_back(gray);
  for (int l = 1; l < cfg.levels; ++l) {
    const double s = std::pow(cfg.scale_factor, l);
    const int w = static_cast<int>(std::lround(gray.width() / s));
    const int h = static_cast<int>(std::lround(gray.height() / s));
    if (w < min_side || h < min_side) break;
    pyramid.push_back(Resize(pyramid.back(), w, h));
  }

  const std::vector<int> quotas =
      LevelQuotas(cfg.max_features, static_cast<int>(pyramid.size()), cfg.scale_factor);
  int carry = 0;
  for (std::size_t l = 0; l < pyramid.size(); ++l) {
    const Image& level = pyramid[l];
    std::vector<Candidate> corners = DetectFast(level, cfg.fast_threshold);
    for (auto& c : corners) c.harris = HarrisResponse(level, c.x, c.y);
    std::stable_sort(corners.begin(), corners.end(),
                     [](const Candidate& a, const Candidate& b) { return a.harris > b.harris; });
    const int budget = quotas[l] + carry;
    const int keep = std::min<int>(budget, static_cast<int>(corners.size()));
    carry = budget - keep;
    if (keep == 0) continue;

    const Image smoothed = GaussianBlur(level, kDescriptorSmoothSigma);
    const double sx = static_cast<double>(gray.width()) / level.width();
    const double sy = static_cast<double>(gray.height()) / level.height();
    for (int i = 0; i < keep; ++i) {
      const Candidate& c = corners[i];
      Feature f;
      f.keypoint.x = (c.x + 0.5) * sx - 0.5;
      f.keypoint.y = (c.y + 0.5) * sy - 0.5;
      f.keypoint.scale_level = static_cast<int>(l);
      f.keypoint.orientation = IntensityCentroidAngle(level, c.x, c.y);
      f.keypoint.response = c.harris;
      f.descriptor = SteeredDescriptor(smoothed, c.x, c.y, f.keypoint.orientation);
      out.push_back(f);
    }
  }
  return out;
}

std::vector<Match> MatchFeatures(const std::vector<Descriptor>& a,
                                 const std::vector<Descriptor>& b) {
  std::vector<Match> matches;
  if (a.empty() || b.empty()) return matches;
  // Best a-index for every b, lowest index winning ties.
  std::vector<int> best_for_b(b.size(), -1);
  std::vector<int> best_dist_b(b.size(), std::numeric_limits<int>::max());
  std::vector<int> nearest(a.size(), -1);
  std::vector<int> d1(a.size(), std::numeric_limits<int>::max());
  std::vector<int> d2(a.size(), std::numeric_limits<int>::max());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const int d = HammingDistance(a[i], b[j]);
      if (d < d1[i]) {
        d2[i] = d1[i];
        d1[i] = d;
        nearest[i] = static_cast<int>(j);
      } else if (d < d2[i]) {
        d2[i] = d;
      }
      if (d < best_dist_b[j]) {
        best_dist_b[j] = d;
        best_for_b[j] = static_cast<int>(i);
      }
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = nearest[i];
    // A lone candidate has no second neighbour and passes the ratio test.
    const bool ratio_ok = b.size() == 1 || d1[i] < kMatchRatio * d2[i];
    if (!ratio_ok) continue;
    if (best_for_b[j] != static_cast<int>(i)) continue;
    matches.push_back({static_cast<int>(i), j, d1[i]});
  }
  std::stable_sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) {
    return x.distance != y.distance ? x.distance < y.distance : x.index_a < y.index_a;
  });
  return matches;
}

std::vector<Descriptor> Descriptors(const std::vector<Feature>& features) {
  std::vector<Descriptor> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.descriptor);
  return out;
}

}  // namespace sketch3d
