// Gradient depth adapter: row 0 is nearest (0), the last row farthest
// (65535), linear in the row index.
#include <CLI11.hpp>
#include <cmath>
#include <iostream>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gradient depth adapter"};
  std::string input, output;
  app.add_option("--input", input, "input image")->required();
  app.add_option("--output", output, "output 16-bit PNG")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    const sketch3d::Image img = sketch3d::ReadImage(input);
    sketch3d::Gray16Image depth;
    depth.width = img.width();
    depth.height = img.height();
    depth.data.resize(static_cast<std::size_t>(depth.width) * depth.height);
    for (int y = 0; y < depth.height; ++y) {
      const auto v = static_cast<std::uint16_t>(
          depth.height == 1 ? 0 : std::lround(65535.0 * y / (depth.height - 1)));
      std::fill_n(depth.data.begin() + static_cast<std::ptrdiff_t>(y) * depth.width, depth.width, v);
    }
    sketch3d::WritePng16(output, depth);
  } catch (const std::exception& e) {
    std::cerr << "depth stub: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
