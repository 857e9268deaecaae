#include "sketch3d/sketch.hpp"

#include <cmath>
#include <string>

#include "sketch3d/error.hpp"

namespace sketch3d {
namespace {

void RequireSingleChannel(const Image& img, const char* op) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(op) + " expects a single-channel image, got " +
                    std::to_string(img.channels()) + " channels");
  }
}

}  // namespace

void SketchParams::Validate() const {
  if (!(blur_sigma > 0.0) || !(highpass_sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "sketch sigmas must be > 0");
  }
  if (!std::isfinite(dodge_scale) || !std::isfinite(highpass_offset)) {
    throw Error(ErrorCode::kInvalidParameter, "sketch parameters must be finite");
  }
}

Image Dodge(const Image& gray, const SketchParams& params) {
  RequireSingleChannel(gray, "dodge");
  params.Validate();
  const Image mask = Invert(GaussianBlur(Invert(gray), params.blur_sigma));
  Image out(gray.width(), gray.height(), 1);
  auto src = gray.data();
  auto m = mask.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = m[i] == 0 ? 255
                       : QuantizeToByte(src[i] * params.dodge_scale / m[i]);
  }
  return out;
}

Image Stylize(const Image& pencil, const SketchParams& params) {
  RequireSingleChannel(pencil, "stylize");
  params.Validate();
  const Image blurred = GaussianBlur(pencil, params.highpass_sigma);
  Image out(pencil.width(), pencil.height(), 1);
  auto src = pencil.data();
  auto low = blurred.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double hp = static_cast<double>(src[i]) - low[i] + params.highpass_offset;
    dst[i] = static_cast<std::uint8_t>(255 - QuantizeToByte(hp));
  }
  return out;
}

Image Sketchify(const Image& photo, const SketchParams& params) {
  return Stylize(Dodge(ToGrayscale(photo), params), params);
}

}  // namespace sketch3d
