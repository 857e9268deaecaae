#include "sketch3d/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch3d/error.hpp"

namespace sketch3d {
namespace {

void CheckShape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "image dimensions must be >= 1, got " + std::to_string(width) +
                    "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidParameter,
                "image must have 1 or 3 channels, got " +
                    std::to_string(channels));
  }
}

void CheckSigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidParameter,
                "blur sigma must be > 0, got " + std::to_string(sigma));
  }
}

// Horizontal then vertical pass over one plane of interleaved samples.
template <typename Get, typename Put>
void SeparableConvolve(int width, int height, int channels,
                       const std::vector<double>& kernel, Get get, Put put) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(static_cast<std::size_t>(width) * height);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int sx = std::clamp(x + k, 0, width - 1);
          acc += kernel[k + radius] * get(sx, y, c);
        }
        tmp[static_cast<std::size_t>(y) * width + x] = acc;
      }
    }
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int sy = std::clamp(y + k, 0, height - 1);
          acc += kernel[k + radius] * tmp[static_cast<std::size_t>(sy) * width + x];
        }
        put(x, y, c, acc);
      }
    }
  }
}

}  // namespace

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  CheckShape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels,
             std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  CheckShape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidParameter,
                "image data length does not match width*height*channels");
  }
}

FloatImage::FloatImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  CheckShape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

FloatImage FloatImage::FromImage(const Image& img) {
  FloatImage out(img.width(), img.height(), img.channels());
  std::copy(img.data().begin(), img.data().end(), out.data_.begin());
  return out;
}

Image FloatImage::ToImage() const {
  Image out(width_, height_, channels_);
  std::transform(data_.begin(), data_.end(), out.data().begin(),
                 QuantizeToByte);
  return out;
}

std::uint8_t QuantizeToByte(double value) {
  if (!(value > 0.0)) return 0;
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(value));
}

Image ToGrayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = QuantizeToByte(0.299 * img.at(x, y, 0) +
                                    0.587 * img.at(x, y, 1) +
                                    0.114 * img.at(x, y, 2));
    }
  }
  return out;
}

Image ToRgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t v = img.at(x, y);
      out.at(x, y, 0) = v;
      out.at(x, y, 1) = v;
      out.at(x, y, 2) = v;
    }
  }
  return out;
}

Image Invert(const Image& img) {
  Image out = img;
  for (auto& v : out.data()) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

std::vector<double> GaussianKernel(double sigma) {
  CheckSigma(sigma);
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-(k * k) / (2.0 * sigma * sigma));
    kernel[k + radius] = w;
    sum += w;
  }
  for (auto& w : kernel) w /= sum;
  return kernel;
}

Image GaussianBlur(const Image& img, double sigma) {
  const std::vector<double> kernel = GaussianKernel(sigma);
  Image out(img.width(), img.height(), img.channels());
  SeparableConvolve(
      img.width(), img.height(), img.channels(), kernel,
      [&](int x, int y, int c) { return static_cast<double>(img.at(x, y, c)); },
      [&](int x, int y, int c, double v) { out.at(x, y, c) = QuantizeToByte(v); });
  return out;
}

FloatImage GaussianBlur(const FloatImage& img, double sigma) {
  const std::vector<double> kernel = GaussianKernel(sigma);
  FloatImage out(img.width(), img.height(), img.channels());
  SeparableConvolve(
      img.width(), img.height(), img.channels(), kernel,
      [&](int x, int y, int c) { return img.at(x, y, c); },
      [&](int x, int y, int c, double v) { out.at(x, y, c) = v; });
  return out;
}

double SampleBilinear(const Image& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bottom;
}

Image Resize(const Image& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "resize target must be >= 1x1, got " +
                    std::to_string(new_width) + "x" +
                    std::to_string(new_height));
  }
  if (new_width == img.width() && new_height == img.height()) return img;
  const double sx = static_cast<double>(img.width()) / new_width;
  const double sy = static_cast<double>(img.height()) / new_height;
  Image out(new_width, new_height, img.channels());
  for (int y = 0; y < new_height; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < new_width; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = QuantizeToByte(SampleBilinear(img, src_x, src_y, c));
      }
    }
  }
  return out;
}

Image Crop(const Image& img, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 1 || height < 1 ||
      x + width > img.width() || y + height > img.height()) {
    throw Error(ErrorCode::kInvalidParameter,
                "crop rectangle (" + std::to_string(x) + "," +
                    std::to_string(y) + "," + std::to_string(width) + "," +
                    std::to_string(height) + ") outside " +
                    std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " image");
  }
  Image out(width, height, img.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(width) * img.channels();
  for (int r = 0; r < height; ++r) {
    const auto src = img.data().subspan(
        (static_cast<std::size_t>(y + r) * img.width() + x) * img.channels(),
        row_bytes);
    std::copy(src.begin(), src.end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(r * row_bytes));
  }
  return out;
}

}  // namespace sketch3d
