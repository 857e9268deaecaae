#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sketch3d/adapter.hpp"
#include "sketch3d/mesh.hpp"
#include "sketch3d/sketch.hpp"
#include "sketch3d/stitch.hpp"

namespace sketch3d {

struct PipelineConfig {
  AdapterSpec style{{}, AdapterKind::kStyle, 300.0};
  AdapterSpec depth{{}, AdapterKind::kDepth, 300.0};
  // Re-run the sketch filter on the (stitched) drawing before styling.
  bool preprocess_sketch = true;
  // Side of the square raster handed to the style adapter.
  int fine_size = 480;
  double relief = kDefaultRelief;
  SketchParams sketch_params;
  StitchOptions stitch;

  void Validate() const;
};

// Stage files inside the working directory, in pipeline order.
struct PipelineOutputs {
  std::optional<std::filesystem::path> stitched;
  std::filesystem::path style_input;
  std::filesystem::path styled;
  std::filesystem::path depth;
  ObjFiles mesh;
  std::filesystem::path manifest;
  std::optional<StitchManyResult> stitch;
};

// Image handed to the style adapter: square fine_size resize, then the sketch
// filter when preprocessing is on, replicated to three channels.
Image PrepareStyleInput(const Image& drawing, const PipelineConfig& cfg);

// stitch (>= 2 inputs) -> prepare -> style adapter -> depth adapter -> mesh.
// Every stage file is written atomically into `work_dir`.
PipelineOutputs RunPipeline(const std::vector<Image>& inputs, const PipelineConfig& cfg,
                            const std::filesystem::path& work_dir);

}  // namespace sketch3d
