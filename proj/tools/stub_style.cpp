// Identity style adapter: the protocol's reference "generator". A 3-channel
// 8-bit PNG input is copied byte for byte; anything else is re-encoded as RGB.
#include <CLI11.hpp>
#include <iostream>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"identity style adapter"};
  std::string input, output;
  app.add_option("--input", input, "input image")->required();
  app.add_option("--output", output, "output PNG")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto bytes = sketch3d::ReadFileBytes(input);
    bool passthrough = false;
    try {
      const sketch3d::PngInfo info = sketch3d::ProbePng(bytes);
      passthrough = info.channels == 3 && !info.has_alpha && info.bit_depth == 8;
    } catch (const sketch3d::Error&) {
    }
    if (passthrough) {
      sketch3d::WriteFileAtomic(output, bytes);
    } else {
      sketch3d::WriteImage(output, sketch3d::ToRgb(sketch3d::DecodeImage(bytes)));
    }
  } catch (const std::exception& e) {
    std::cerr << "style stub: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
