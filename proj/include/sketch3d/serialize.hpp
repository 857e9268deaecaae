#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "sketch3d/eval.hpp"
#include "sketch3d/features.hpp"
#include "sketch3d/homography.hpp"
#include "sketch3d/pipeline.hpp"
#include "sketch3d/stitch.hpp"

namespace sketch3d {

using Json = nlohmann::ordered_json;

// Nine row-major numbers.
Json HomographyToJson(const Homography& h);
// Accepts a bare 9-element array or an object with a "homography" member.
Homography HomographyFromJson(const Json& j);

Json FeaturesToJson(const std::vector<Feature>& features, int width, int height);
std::vector<Feature> FeaturesFromJson(const Json& j);

Json StitchResultToJson(const StitchResult& r);
Json StitchReportToJson(const StitchManyResult& r);

// Everything the CLI can configure; JSON members override defaults.
struct AppConfig {
  std::uint64_t seed = 0;
  SketchParams sketch;
  StitchOptions stitch;
  PipelineConfig pipeline;
};

// Unknown members are rejected so typos do not pass silently.
AppConfig ParseConfig(const Json& j, AppConfig base = {});
AppConfig LoadConfig(const std::string& path, AppConfig base = {});

// {"overlap": [..], "corner_shift": [..], "style_perturbation": [..],
//  "seeds": [..] | count}. Missing axes keep their defaults.
SweepGrid ParseGrid(const Json& j, std::uint64_t default_seed);

}  // namespace sketch3d
