#include "sketch3d/serialize.hpp"

#include <fstream>
#include <set>

#include "sketch3d/error.hpp"

namespace sketch3d {
namespace {

void RejectUnknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParameter, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::kInvalidParameter, "unknown config key " + where + "." + key);
    }
  }
}

template <typename T>
void Read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidParameter, std::string("config key ") + key + ": " + e.what());
    }
  }
}

void ReadAdapter(const Json& j, AdapterSpec& spec, const std::string& where) {
  RejectUnknown(j, {"executable", "timeout"}, where);
  std::string exe = spec.executable.string();
  Read(j, "executable", exe);
  spec.executable = exe;
  Read(j, "timeout", spec.timeout_seconds);
}

std::vector<double> DoubleList(const Json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw Error(ErrorCode::kInvalidParameter, std::string(key) + " must be a list");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get<double>());
  return out;
}

}  // namespace

Json HomographyToJson(const Homography& h) {
  Json arr = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) arr.push_back(h(r, c));
  }
  return arr;
}

Homography HomographyFromJson(const Json& j) {
  const Json* arr_ptr = &j;
  if (j.is_object()) {
    for (const char* key : {"homography", "true_h"}) {
      if (j.contains(key)) {
        arr_ptr = &j.at(key);
        break;
      }
    }
  }
  const Json& arr = *arr_ptr;
  if (!arr.is_array() || arr.size() != 9) {
    throw Error(ErrorCode::kInvalidParameter, "homography JSON must hold 9 numbers");
  }
  Eigen::Matrix3d m;
  for (int k = 0; k < 9; ++k) {
    if (!arr[k].is_number()) {
      throw Error(ErrorCode::kInvalidParameter, "homography entries must be numbers");
    }
    m(k / 3, k % 3) = arr[k].get<double>();
  }
  return Homography(m);
}

Json FeaturesToJson(const std::vector<Feature>& features, int width, int height) {
  Json kps = Json::array();
  for (const auto& f : features) {
    kps.push_back({{"x", f.keypoint.x},
                   {"y", f.keypoint.y},
                   {"level", f.keypoint.scale_level},
                   {"orientation", f.keypoint.orientation},
                   {"response", f.keypoint.response},
                   {"descriptor", ToHex(f.descriptor)}});
  }
  return Json{{"width", width}, {"height", height}, {"count", features.size()},
              {"keypoints", kps}};
}

std::vector<Feature> FeaturesFromJson(const Json& j) {
  std::vector<Feature> out;
  for (const auto& k : j.at("keypoints")) {
    Feature f;
    f.keypoint.x = k.at("x").get<double>();
    f.keypoint.y = k.at("y").get<double>();
    f.keypoint.scale_level = k.at("level").get<int>();
    f.keypoint.orientation = k.at("orientation").get<double>();
    f.keypoint.response = k.at("response").get<double>();
    f.descriptor = DescriptorFromHex(k.at("descriptor").get<std::string>());
    out.push_back(f);
  }
  return out;
}

Json StitchResultToJson(const StitchResult& r) {
  return Json{{"homography", HomographyToJson(r.homography)},
              {"composite", HomographyToJson(r.composite)},
              {"translation", {r.translation.x, r.translation.y}},
              {"canvas_size", {r.canvas.width(), r.canvas.height()}},
              {"warped_origin", {r.warped_origin_x, r.warped_origin_y}},
              {"d2_origin", {r.d2_origin_x, r.d2_origin_y}},
              {"stage1_matches", r.stage1_matches},
              {"stage2_matches", r.stage2_matches},
              {"ransac_inliers", r.ransac_inliers},
              {"translation_inliers", r.translation_inliers},
              {"inlier_ratio", r.inlier_ratio}};
}

Json StitchReportToJson(const StitchManyResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) steps.push_back(StitchResultToJson(s));
  Json out = StitchResultToJson(r.final);
  out["steps"] = steps;
  return out;
}

AppConfig ParseConfig(const Json& j, AppConfig cfg) {
  RejectUnknown(j, {"seed", "sketch", "features", "ransac", "pipeline"}, "config");
  Read(j, "seed", cfg.seed);
  if (j.contains("sketch")) {
    const Json& s = j.at("sketch");
    RejectUnknown(s, {"blur_sigma", "dodge_scale", "highpass_sigma", "highpass_offset"}, "sketch");
    Read(s, "blur_sigma", cfg.sketch.blur_sigma);
    Read(s, "dodge_scale", cfg.sketch.dodge_scale);
    Read(s, "highpass_sigma", cfg.sketch.highpass_sigma);
    Read(s, "highpass_offset", cfg.sketch.highpass_offset);
  }
  if (j.contains("features")) {
    RejectUnknown(j.at("features"), {"max_features"}, "features");
    Read(j.at("features"), "max_features", cfg.stitch.max_features);
  }
  if (j.contains("ransac")) {
    const Json& r = j.at("ransac");
    RejectUnknown(r, {"max_iterations", "inlier_threshold", "min_inliers", "confidence"},
                  "ransac");
    Read(r, "max_iterations", cfg.stitch.ransac.max_iterations);
    Read(r, "inlier_threshold", cfg.stitch.ransac.inlier_threshold);
    Read(r, "min_inliers", cfg.stitch.ransac.min_inliers);
    Read(r, "confidence", cfg.stitch.ransac.confidence);
  }
  if (j.contains("pipeline")) {
    const Json& p = j.at("pipeline");
    RejectUnknown(p, {"fine_size", "relief", "preprocess_sketch", "style_adapter", "depth_adapter"},
                  "pipeline");
    Read(p, "fine_size", cfg.pipeline.fine_size);
    Read(p, "relief", cfg.pipeline.relief);
    Read(p, "preprocess_sketch", cfg.pipeline.preprocess_sketch);
    if (p.contains("style_adapter")) {
      ReadAdapter(p.at("style_adapter"), cfg.pipeline.style, "pipeline.style_adapter");
    }
    if (p.contains("depth_adapter")) {
      ReadAdapter(p.at("depth_adapter"), cfg.pipeline.depth, "pipeline.depth_adapter");
    }
  }
  cfg.stitch.ransac.seed = cfg.seed;
  cfg.pipeline.sketch_params = cfg.sketch;
  cfg.pipeline.stitch = cfg.stitch;
  cfg.sketch.Validate();
  cfg.stitch.ransac.Validate();
  cfg.pipeline.Validate();
  if (cfg.stitch.max_features < 1) {
    throw Error(ErrorCode::kInvalidParameter, "features.max_features must be >= 1");
  }
  return cfg;
}

AppConfig LoadConfig(const std::string& path, AppConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParameter, "config " + path + ": " + e.what());
  }
  return ParseConfig(j, std::move(base));
}

SweepGrid ParseGrid(const Json& j, std::uint64_t default_seed) {
  RejectUnknown(j, {"overlap", "corner_shift", "style_perturbation", "seeds"}, "grid");
  SweepGrid grid;
  try {
    grid.overlaps = DoubleList(j, "overlap", grid.overlaps);
    grid.corner_shifts = DoubleList(j, "corner_shift", grid.corner_shifts);
    grid.style_perturbations = DoubleList(j, "style_perturbation", grid.style_perturbations);
    grid.seeds = {default_seed};
    if (j.contains("seeds")) {
      const Json& s = j.at("seeds");
      grid.seeds.clear();
      if (s.is_number_integer()) {
        for (std::uint64_t k = 0; k < s.get<std::uint64_t>(); ++k) grid.seeds.push_back(default_seed + k);
      } else {
        for (const auto& v : s) grid.seeds.push_back(v.get<std::uint64_t>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParameter, std::string("grid: ") + e.what());
  }
  return grid;
}

}  // namespace sketch3d
