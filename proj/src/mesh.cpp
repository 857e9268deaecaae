#include "sketch3d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sketch3d/error.hpp"

namespace sketch3d {

DepthMap::DepthMap(int w, int h, std::vector<double> v)
    : width(w), height(h), values(std::move(v)) {
  if (w < 1 || h < 1 || values.size() != static_cast<std::size_t>(w) * h) {
    throw Error(ErrorCode::kInvalidParameter, "depth map size does not match its dimensions");
  }
  for (double d : values) {
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorCode::kInvalidParameter, "depth values must be finite and >= 0");
    }
  }
}

DepthMap DepthFromPng16(const Gray16Image& img) {
  std::vector<double> values(img.data.size());
  std::transform(img.data.begin(), img.data.end(), values.begin(),
                 [](std::uint16_t v) { return v / 65535.0; });
  return DepthMap(img.width, img.height, std::move(values));
}

DepthMap NormalizeDepth(const DepthMap& depth) {
  const auto [lo_it, hi_it] = std::minmax_element(depth.values.begin(), depth.values.end());
  if (lo_it == depth.values.end() || !(*hi_it > *lo_it)) {
    throw Error(ErrorCode::kDegenerateDepth, "depth map is constant");
  }
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  std::vector<double> out(depth.values.size());
  std::transform(depth.values.begin(), depth.values.end(), out.begin(),
                 [&](double d) { return (d - lo) / range; });
  return DepthMap(depth.width, depth.height, std::move(out));
}

TexturedMesh DepthToMesh(const DepthMap& depth, const Image& texture, double relief) {
  if (!(relief > 0.0) || !std::isfinite(relief)) {
    throw Error(ErrorCode::kInvalidParameter, "relief must be > 0");
  }
  if (texture.width() != depth.width || texture.height() != depth.height) {
    throw Error(ErrorCode::kInvalidParameter, "texture and depth dimensions differ");
  }
  if (depth.width < 2 || depth.height < 2) {
    throw Error(ErrorCode::kInvalidParameter, "depth map must be at least 2x2");
  }
  const DepthMap norm = NormalizeDepth(depth);
  const int w = depth.width;
  const int h = depth.height;
  TexturedMesh mesh;
  mesh.texture = texture;
  mesh.vertices.reserve(static_cast<std::size_t>(w) * h);
  mesh.uvs.reserve(static_cast<std::size_t>(w) * h);
  for (int i = 0; i < h; ++i) {
    const double y = 1.0 - static_cast<double>(i) / (h - 1);
    for (int j = 0; j < w; ++j) {
      const double x = static_cast<double>(j) / (w - 1);
      mesh.vertices.push_back({x, y, -relief * norm.at(j, i)});
      mesh.uvs.push_back({x, y});
    }
  }
  mesh.faces.reserve(2 * static_cast<std::size_t>(w - 1) * (h - 1));
  for (int i = 0; i + 1 < h; ++i) {
    for (int j = 0; j + 1 < w; ++j) {
      const int v00 = i * w + j;
      const int v01 = v00 + 1;
      const int v10 = v00 + w;
      const int v11 = v10 + 1;
      mesh.faces.push_back({v00, v10, v11});
      mesh.faces.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

std::string FormatObj(const TexturedMesh& mesh, const std::string& mtl_name) {
  std::string out;
  out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 40);
  out += "# sketch3d height-field mesh\n";
  out += "mtllib " + mtl_name + "\n";
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v[0], v[1], v[2]);
    out += buf;
  }
  for (const auto& t : mesh.uvs) {
    std::snprintf(buf, sizeof(buf), "vt %.6f %.6f\n", t[0], t[1]);
    out += buf;
  }
  out += "usemtl textured\n";
  for (const auto& f : mesh.faces) {
    std::snprintf(buf, sizeof(buf), "f %d/%d %d/%d %d/%d\n", f[0] + 1, f[0] + 1, f[1] + 1,
                  f[1] + 1, f[2] + 1, f[2] + 1);
    out += buf;
  }
  return out;
}

ObjFiles ExportObj(const TexturedMesh& mesh, const std::filesystem::path& obj_path) {
  ObjFiles files;
  files.obj = obj_path;
  files.mtl = obj_path;
  files.mtl.replace_extension(".mtl");
  files.texture = obj_path.parent_path() / (obj_path.stem().string() + "_texture.png");
  const std::string mtl = "newmtl textured\n"
                          "Ka 1.000000 1.000000 1.000000\n"
                          "Kd 1.000000 1.000000 1.000000\n"
                          "Ks 0.000000 0.000000 0.000000\n"
                          "illum 1\n"
                          "map_Kd " + files.texture.filename().string() + "\n";
  try {
    WriteImage(files.texture, mesh.texture);
    WriteFileAtomic(files.mtl, mtl);
    WriteFileAtomic(files.obj, FormatObj(mesh, files.mtl.filename().string()));
  } catch (const Error& e) {
    throw Error(ErrorCode::kIo, "exporting " + obj_path.string() + ": " + e.what());
  }
  return files;
}

ParsedObj ParseObj(const std::string& text) {
  ParsedObj obj;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kIo, "OBJ line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::array<double, 3> v{};
      if (!(ls >> v[0] >> v[1] >> v[2])) fail("malformed vertex");
      obj.vertices.push_back(v);
    } else if (tag == "vt") {
      std::array<double, 2> t{};
      if (!(ls >> t[0] >> t[1])) fail("malformed texture coordinate");
      obj.uvs.push_back(t);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k) {
        std::string token;
        if (!(ls >> token)) fail("face needs three corners");
        const auto slash = token.find('/');
        try {
          f[k] = std::stoi(token.substr(0, slash)) - 1;
          if (slash != std::string::npos && std::stoi(token.substr(slash + 1)) - 1 != f[k]) {
            fail("vertex and uv indices differ");
          }
        } catch (const std::logic_error&) {
          fail("malformed face index");
        }
      }
      obj.faces.push_back(f);
    } else if (tag == "mtllib") {
      ls >> obj.mtllib;
    }
  }
  for (const auto& f : obj.faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= static_cast<int>(obj.vertices.size())) {
        throw Error(ErrorCode::kIo, "OBJ face index out of range");
      }
    }
  }
  return obj;
}

ParsedObj ReadObj(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return ParseObj(std::string(bytes.begin(), bytes.end()));
}

}  // namespace sketch3d
