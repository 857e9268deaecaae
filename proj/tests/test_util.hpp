#pragma once

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sketch3d/image.hpp"
#include "sketch3d/random.hpp"

namespace sketch3d::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = info ? std::string(info->test_suite_name()) + "_" + info->name() : "tmp";
    for (char& c : name) {
      if (c == '/') c = '_';
    }
    path_ = std::filesystem::temp_directory_path() /
            ("sketch3d_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline Image RandomImage(int w, int h, int ch, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h, ch);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.Index(256));
  return img;
}

inline void WriteScript(const std::filesystem::path& path, const std::string& body) {
  {
    std::ofstream out(path);
    out << "#!/bin/sh\n" << body << "\n";
  }
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
}

}  // namespace sketch3d::testing

#include "sketch3d/homography.hpp"

namespace sketch3d::testing {

// Random projective map of the size×size square: each corner moves by up to shift·size.
inline Homography RandomHomography(Rng& rng, double size, double shift) {
  const double s = shift * size;
  std::vector<PointPair> corners;
  for (auto [x, y] : {std::pair{0.0, 0.0}, {size, 0.0}, {size, size}, {0.0, size}}) {
    corners.push_back({{x, y}, {x + rng.Uniform(-s, s), y + rng.Uniform(-s, s)}});
  }
  return Dlt(corners);
}

}  // namespace sketch3d::testing
