#include "sketch3d/pipeline.hpp"

#include <json.hpp>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"

namespace sketch3d {

namespace fs = std::filesystem;

void PipelineConfig::Validate() const {
  if (fine_size < 64) {
    throw Error(ErrorCode::kInvalidParameter, "fine_size must be >= 64");
  }
  if (!(relief > 0.0)) throw Error(ErrorCode::kInvalidParameter, "relief must be > 0");
  sketch_params.Validate();
  stitch.ransac.Validate();
  if (style.kind != AdapterKind::kStyle || depth.kind != AdapterKind::kDepth) {
    throw Error(ErrorCode::kInvalidParameter, "adapter kinds are swapped");
  }
}

Image PrepareStyleInput(const Image& drawing, const PipelineConfig& cfg) {
  const Image resized = Resize(drawing, cfg.fine_size, cfg.fine_size);
  return ToRgb(cfg.preprocess_sketch ? Sketchify(resized, cfg.sketch_params) : resized);
}

PipelineOutputs RunPipeline(const std::vector<Image>& inputs, const PipelineConfig& cfg,
                            const fs::path& work_dir) {
  if (inputs.empty()) {
    throw Error(ErrorCode::kInsufficientData, "pipeline needs at least one drawing");
  }
  cfg.Validate();
  CheckAdapter(cfg.style);
  CheckAdapter(cfg.depth);
  fs::create_directories(work_dir);

  nlohmann::ordered_json manifest;
  manifest["inputs"] = inputs.size();
  PipelineOutputs out;

  Image drawing = inputs.front();
  if (inputs.size() >= 2) {
    StitchManyResult stitched = StitchMany(inputs, cfg.stitch);
    drawing = stitched.final.canvas;
    out.stitched = work_dir / "01_stitched.png";
    WriteImage(*out.stitched, drawing);
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const auto& s : stitched.steps) {
      steps.push_back({{"stage1_matches", s.stage1_matches},
                       {"stage2_matches", s.stage2_matches},
                       {"ransac_inliers", s.ransac_inliers},
                       {"inlier_ratio", s.inlier_ratio}});
    }
    manifest["stitch"] = steps;
    out.stitch = std::move(stitched);
  }

  out.style_input = work_dir / "02_style_input.png";
  WriteImage(out.style_input, PrepareStyleInput(drawing, cfg));

  out.styled = work_dir / "03_styled.png";
  InvokeAdapter(cfg.style, out.style_input, out.styled);

  out.depth = work_dir / "04_depth.png";
  InvokeAdapter(cfg.depth, out.styled, out.depth);

  const Image texture = ReadImage(out.styled);
  const DepthMap depth = DepthFromPng16(ReadPng16(out.depth));
  out.mesh = ExportObj(DepthToMesh(depth, texture, cfg.relief), work_dir / "05_mesh.obj");

  manifest["fine_size"] = cfg.fine_size;
  manifest["resize_interpolation"] = "bilinear";
  manifest["preprocess_sketch"] = cfg.preprocess_sketch;
  manifest["relief"] = cfg.relief;
  manifest["adapters"] = {{"style", cfg.style.executable.string()},
                          {"depth", cfg.depth.executable.string()}};
  manifest["stages"] = {
      {"stitched", out.stitched ? out.stitched->filename().string() : ""},
      {"style_input", out.style_input.filename().string()},
      {"styled", out.styled.filename().string()},
      {"depth", out.depth.filename().string()},
      {"obj", out.mesh.obj.filename().string()},
      {"mtl", out.mesh.mtl.filename().string()},
      {"texture", out.mesh.texture.filename().string()}};
  out.manifest = work_dir / "pipeline.json";
  WriteFileAtomic(out.manifest, manifest.dump(2) + "\n");
  return out;
}

}  // namespace sketch3d
