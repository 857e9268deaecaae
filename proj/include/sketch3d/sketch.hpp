#pragma once

#include "sketch3d/image.hpp"

namespace sketch3d {

struct SketchParams {
  // Smoothing of the inverted grayscale that forms the dodge mask.
  double blur_sigma = 8.0;
  double dodge_scale = 256.0;
  double highpass_sigma = 4.0;
  double highpass_offset = 128.0;

  void Validate() const;
};

// Pencil look-alike: gray * scale / mask with
// mask = invert(blur(invert(gray))). Zero mask pixels become white.
Image Dodge(const Image& gray, const SketchParams& params = {});

// Negated unsharp residual: invert(clamp(pencil - blur(pencil) + offset)).
Image Stylize(const Image& pencil, const SketchParams& params = {});

// Stylize(Dodge(ToGrayscale(photo))).
Image Sketchify(const Image& photo, const SketchParams& params = {});

}  // namespace sketch3d
