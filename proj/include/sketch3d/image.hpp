#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sketch3d {

// 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[Index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[Index(x, y, c)]; }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t Index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Real-valued counterpart used for intermediate filtering.
class FloatImage {
 public:
  FloatImage() = default;
  FloatImage(int width, int height, int channels, double fill = 0.0);

  static FloatImage FromImage(const Image& img);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  double at(int x, int y, int c = 0) const { return data_[Index(x, y, c)]; }
  double& at(int x, int y, int c = 0) { return data_[Index(x, y, c)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // Quantizes with round-half-away-from-zero and clamping to [0, 255].
  Image ToImage() const;

 private:
  std::size_t Index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

std::uint8_t QuantizeToByte(double value);

// Rec.601 luma. Single-channel input is returned unchanged.
Image ToGrayscale(const Image& img);

// Replicates a gray image into three channels; 3-channel input is copied.
Image ToRgb(const Image& img);

Image Invert(const Image& img);

// Separable Gaussian, radius ceil(3 sigma), unit-sum kernel, edge replication.
Image GaussianBlur(const Image& img, double sigma);
FloatImage GaussianBlur(const FloatImage& img, double sigma);

// Normalized sampled Gaussian taps, index 0 is offset -radius.
std::vector<double> GaussianKernel(double sigma);

// Bilinear resampling with pixel-center alignment; aspect ratio is the
// caller's business.
Image Resize(const Image& img, int new_width, int new_height);

Image Crop(const Image& img, int x, int y, int width, int height);

// Bilinear sample at a subpixel position, coordinates clamped to the raster.
double SampleBilinear(const Image& img, double x, double y, int c = 0);

}  // namespace sketch3d
