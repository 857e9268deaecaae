#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "sketch3d/image.hpp"
#include "sketch3d/image_io.hpp"

namespace sketch3d {

// Relative depth, row-major; larger values are farther away.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DepthMap() = default;
  DepthMap(int w, int h, std::vector<double> v);

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// 0 = nearest, 65535 = farthest.
DepthMap DepthFromPng16(const Gray16Image& img);

// Affine rescale to [0, 1]; throws degenerate-depth on constant input.
DepthMap NormalizeDepth(const DepthMap& depth);

struct TexturedMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<double, 2>> uvs;
  // Zero-based, counter-clockwise seen from +z.
  std::vector<std::array<int, 3>> faces;
  Image texture;
};

inline constexpr double kDefaultRelief = 0.3;

// Height-field grid: vertex (row i, col j) sits at x = j/(W-1),
// y = 1 - i/(H-1), z = -relief * normalized depth; uv mirrors (x, y).
TexturedMesh DepthToMesh(const DepthMap& depth, const Image& texture,
                         double relief = kDefaultRelief);

struct ObjFiles {
  std::filesystem::path obj;
  std::filesystem::path mtl;
  std::filesystem::path texture;
};

// Writes <stem>.obj, <stem>.mtl and <stem>_texture.png next to each other;
// `obj_path` names the .obj file.
ObjFiles ExportObj(const TexturedMesh& mesh, const std::filesystem::path& obj_path);

std::string FormatObj(const TexturedMesh& mesh, const std::string& mtl_name);

struct ParsedObj {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<double, 2>> uvs;
  std::vector<std::array<int, 3>> faces;
  std::string mtllib;
};

// Reads the subset of Wavefront OBJ that ExportObj writes.
ParsedObj ParseObj(const std::string& text);
ParsedObj ReadObj(const std::filesystem::path& path);

}  // namespace sketch3d
