#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"
#include "sketch3d/mesh.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace sketch3d {
namespace {

using testing::TempDir;

DepthMap RandomDepth(int w, int h, Rng& rng) {
  std::vector<double> v;
  for (int i = 0; i < w * h; ++i) v.push_back(rng.Uniform(0, 10));
  v[0] = 0;
  v[1] = 10;  // never constant
  return DepthMap(w, h, v);
}

DepthMap Ramp(int w, int h) {
  std::vector<double> v;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) v.push_back(2.0 * j + 3.0 * i + 1.0);
  }
  return DepthMap(w, h, v);
}

TEST(DepthMap, RejectsBadValues) {
  EXPECT_THROW(DepthMap(2, 2, {0, 1, 2}), Error);
  EXPECT_THROW(DepthMap(2, 1, {0, -1}), Error);
  EXPECT_THROW(DepthMap(2, 1, {0, std::nan("")}), Error);
}

TEST(NormalizeDepth, AffineToUnitRange) {
  const DepthMap n = NormalizeDepth(DepthMap(3, 1, {2, 4, 6}));
  EXPECT_EQ(n.values, (std::vector<double>{0, 0.5, 1}));
  const DepthMap unit(2, 2, {0, 0.25, 1, 0.5});
  EXPECT_EQ(NormalizeDepth(unit).values, unit.values);
}

TEST(NormalizeDepth, ConstantIsDegenerate) {
  try {
    NormalizeDepth(DepthMap(3, 3, std::vector<double>(9, 4.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateDepth);
  }
}

TEST(DepthFromPng16, ScalesToUnit) {
  const DepthMap d = DepthFromPng16({2, 1, {0, 65535}});
  EXPECT_EQ(d.values, (std::vector<double>{0, 1}));
}

TEST(DepthToMesh, TwoByTwoHandEnumerated) {
  const TexturedMesh m = DepthToMesh(DepthMap(2, 2, {0, 1, 2, 3}), Image(2, 2, 3, 9), 0.3);
  ASSERT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.faces.size(), 2u);
  const double z[4] = {0, -0.1, -0.2, -0.3};
  for (int v = 0; v < 4; ++v) EXPECT_NEAR(m.vertices[v][2], z[v], 1e-15);
  EXPECT_EQ(m.vertices[0][0], 0.0);
  EXPECT_EQ(m.vertices[0][1], 1.0);  // row 0 is the top
  EXPECT_EQ(m.vertices[3][0], 1.0);
  EXPECT_EQ(m.vertices[3][1], 0.0);
  EXPECT_EQ(m.uvs[2], (std::array<double, 2>{0.0, 0.0}));
}

TEST(DepthToMesh, FourByThreeCounts) {
  Rng rng(1);
  const TexturedMesh m = DepthToMesh(RandomDepth(4, 3, rng), Image(4, 3, 3));
  EXPECT_EQ(m.vertices.size(), 12u);
  EXPECT_EQ(m.uvs.size(), 12u);
  EXPECT_EQ(m.faces.size(), 12u);
}

TEST(DepthToMesh, ContractOnRandomGrids) {
  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 2 + static_cast<int>(rng.Index(63)), h = 2 + static_cast<int>(rng.Index(63));
    const double relief = rng.Uniform(0.05, 2.0);
    const TexturedMesh m = DepthToMesh(RandomDepth(w, h, rng), Image(w, h, 3), relief);
    ASSERT_EQ(m.vertices.size(), static_cast<std::size_t>(w * h));
    ASSERT_EQ(m.uvs.size(), static_cast<std::size_t>(w * h));
    ASSERT_EQ(m.faces.size(), static_cast<std::size_t>(2 * (w - 1) * (h - 1)));
    for (const auto& v : m.vertices) {
      EXPECT_GE(v[2], -relief);
      EXPECT_LE(v[2], 0.0);
    }
    for (const auto& uv : m.uvs) {
      EXPECT_TRUE(uv[0] >= 0 && uv[0] <= 1 && uv[1] >= 0 && uv[1] <= 1);
    }
    for (const auto& f : m.faces) {
      for (int i : f) ASSERT_TRUE(i >= 0 && i < w * h);
      // Counter-clockwise seen from +z.
      const auto& a = m.vertices[f[0]];
      const auto& b = m.vertices[f[1]];
      const auto& c = m.vertices[f[2]];
      EXPECT_GT((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]), 0.0);
    }
    EXPECT_EQ(oracle::ManifoldViolations(m, w, h), 0);
  }
}

TEST(DepthToMesh, PlanarRampIsCoplanar) {
  EXPECT_LT(oracle::PlaneFitResidual(DepthToMesh(Ramp(17, 11), Image(17, 11, 3))), 1e-9);
}

TEST(DepthToMesh, DeeperIsFurther) {
  Rng rng(3);
  DepthMap d1 = RandomDepth(9, 7, rng);
  DepthMap d2 = d1;
  for (std::size_t i = 2; i < d2.values.size(); ++i) {
    d2.values[i] = std::min(10.0, d2.values[i] + rng.Uniform(0, 3));
  }
  const TexturedMesh m1 = DepthToMesh(d1, Image(9, 7, 3)), m2 = DepthToMesh(d2, Image(9, 7, 3));
  for (std::size_t i = 0; i < m1.vertices.size(); ++i) {
    EXPECT_GE(m1.vertices[i][2], m2.vertices[i][2]);
  }
}

TEST(DepthToMesh, Errors) {
  const DepthMap d(3, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_THROW(DepthToMesh(d, Image(4, 3, 3)), Error);
  EXPECT_THROW(DepthToMesh(d, Image(3, 3, 3), 0.0), Error);
  EXPECT_THROW(DepthToMesh(DepthMap(3, 3, std::vector<double>(9, 1.0)), Image(3, 3, 3)), Error);
}

TEST(Obj, TwoByTwoRecordCounts) {
  const std::string text =
      FormatObj(DepthToMesh(DepthMap(2, 2, {0, 1, 2, 3}), Image(2, 2, 3)), "m.mtl");
  std::istringstream in(text);
  std::map<std::string, int> tags;
  std::string line;
  while (std::getline(in, line)) {
    const std::string tag = line.substr(0, line.find(' '));
    ++tags[tag];
    if (tag == "f") {
      int a, b, c, d, e, f;
      char s1, s2, s3;
      std::istringstream ls(line.substr(2));
      ASSERT_TRUE(ls >> a >> s1 >> b >> c >> s2 >> d >> e >> s3 >> f);
      EXPECT_EQ(a, b);
      EXPECT_EQ(c, d);
      EXPECT_EQ(e, f);
      EXPECT_GE(std::min({a, c, e}), 1);
    }
  }
  EXPECT_EQ(tags["v"], 4);
  EXPECT_EQ(tags["vt"], 4);
  EXPECT_EQ(tags["f"], 2);
  EXPECT_EQ(tags["mtllib"], 1);
}

TEST(Obj, ExportAndReparseRoundTrip) {
  TempDir dir;
  Rng rng(4);
  const TexturedMesh m = DepthToMesh(RandomDepth(13, 9, rng), testing::RandomImage(13, 9, 3, 4));
  const ObjFiles files = ExportObj(m, dir / "scene.obj");
  ASSERT_TRUE(std::filesystem::exists(files.obj));
  ASSERT_TRUE(std::filesystem::exists(files.mtl));
  ASSERT_TRUE(std::filesystem::exists(files.texture));
  EXPECT_EQ(ReadImage(files.texture), m.texture);

  const ParsedObj p = ReadObj(files.obj);
  EXPECT_EQ(p.mtllib, files.mtl.filename().string());
  ASSERT_EQ(p.vertices.size(), m.vertices.size());
  ASSERT_EQ(p.uvs.size(), m.uvs.size());
  EXPECT_EQ(p.faces, m.faces);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(p.vertices[i][k], m.vertices[i][k], 1e-6);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(p.uvs[i][k], m.uvs[i][k], 1e-6);
  }
  std::ifstream mtl(files.mtl);
  const std::string mtl_text((std::istreambuf_iterator<char>(mtl)), {});
  EXPECT_NE(mtl_text.find("map_Kd " + files.texture.filename().string()), std::string::npos);
}

TEST(Obj, MalformedInputRejected) {
  EXPECT_THROW(ParseObj("v 0 0 0\nf 1/1 2/2 3/3\n"), Error);
  EXPECT_THROW(ParseObj("v 0 zero 0\n"), Error);
}

}  // namespace
}  // namespace sketch3d
