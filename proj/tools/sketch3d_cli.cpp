// sketch3d: sketches in, textured height-field mesh out.
//
// Exit codes: 0 success, 2 invalid input, 3 stitch failure, 4 adapter failure.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sketch3d/dataset.hpp"
#include "sketch3d/error.hpp"
#include "sketch3d/eval.hpp"
#include "sketch3d/features.hpp"
#include "sketch3d/image_io.hpp"
#include "sketch3d/mesh.hpp"
#include "sketch3d/pipeline.hpp"
#include "sketch3d/serialize.hpp"
#include "sketch3d/sketch.hpp"
#include "sketch3d/stitch.hpp"

namespace fs = std::filesystem;
using namespace sketch3d;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitStitchFailure = 3;
constexpr int kExitAdapterFailure = 4;

fs::path SelfDirectory() {
  std::error_code ec;
  const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::current_path() : exe.parent_path();
}

void WriteJson(const fs::path& path, const Json& j) { WriteFileAtomic(path, j.dump(2) + "\n"); }

Json ReadJson(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParameter, path.string() + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketch3d: pencil-sketch synthesis, sketch stitching and depth meshing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed, "seed for every randomized stage");
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);

  // Sketch-filter overrides, shared by the subcommands that render sketches.
  std::optional<double> blur_sigma, hp_sigma, hp_offset;
  auto add_sketch_flags = [&](CLI::App* sub) {
    sub->add_option("--blur-sigma", blur_sigma, "dodge mask blur sigma (default 8)");
    sub->add_option("--hp-sigma", hp_sigma, "high-pass blur sigma (default 4)");
    sub->add_option("--hp-offset", hp_offset, "high-pass mid-gray offset (default 128)");
  };

  auto* sketchify = app.add_subcommand("sketchify", "photo -> online-sketch-style drawing");
  std::string sk_in, sk_out;
  sketchify->add_option("input", sk_in)->required()->check(CLI::ExistingFile);
  sketchify->add_option("output", sk_out)->required();
  add_sketch_flags(sketchify);

  auto* features = app.add_subcommand("features", "dump ORB keypoints and descriptors as JSON");
  std::string ft_in, ft_out;
  std::optional<int> max_features;
  features->add_option("image", ft_in)->required()->check(CLI::ExistingFile);
  features->add_option("--out", ft_out)->required();
  features->add_option("--max-features", max_features);

  auto* warp = app.add_subcommand("warp", "apply a homography to an image");
  std::string wp_in, wp_h, wp_out, wp_cov;
  warp->add_option("image", wp_in)->required()->check(CLI::ExistingFile);
  warp->add_option("--homography", wp_h, "JSON with 9 row-major numbers")->required()->check(CLI::ExistingFile);
  warp->add_option("--out", wp_out)->required();
  warp->add_option("--coverage", wp_cov, "also write the coverage mask");

  auto* stitch = app.add_subcommand("stitch", "stitch overlapping drawings left to right");
  std::vector<std::string> st_in;
  std::string st_out, st_report;
  stitch->add_option("images", st_in)->required()->expected(2, -1)->check(CLI::ExistingFile);
  stitch->add_option("--out", st_out)->required();
  stitch->add_option("--report", st_report);

  auto* dataset = app.add_subcommand("dataset", "build trainA/trainB folders from a photo corpus");
  std::string ds_corpus, ds_out;
  DatasetOptions ds_opts;
  dataset->add_option("corpus", ds_corpus)->required()->check(CLI::ExistingDirectory);
  dataset->add_option("out", ds_out)->required();
  dataset->add_option("--subset", ds_opts.subset_size, "images per side (default 600)");
  dataset->add_option("--resize", ds_opts.resize_to, "stored short side (default 400)");
  dataset->add_option("--crop", ds_opts.crop_size, "trainer crop size (default 320)");
  add_sketch_flags(dataset);

  auto* toygen = app.add_subcommand("toygen", "cut a drawing into a warped toy stitching pair");
  std::string tg_sketch, tg_out;
  double tg_overlap = 0.4, tg_shift = 0.1;
  int tg_size = 512;
  toygen->add_option("--sketch", tg_sketch, "drawing to cut (default: synthetic)")
      ->check(CLI::ExistingFile);
  toygen->add_option("--out", tg_out, "output directory")->required();
  toygen->add_option("--overlap", tg_overlap);
  toygen->add_option("--shift", tg_shift, "max corner shift, fraction of width");
  toygen->add_option("--size", tg_size, "synthetic drawing side");
  auto* tg_render = toygen->add_flag("--render", "pass the drawing through the sketch filter first");
  add_sketch_flags(toygen);

  auto* eval = app.add_subcommand("eval", "toy-pair stitching sweep -> CSV");
  std::string ev_sketch, ev_grid, ev_out;
  int ev_size = 512;
  eval->add_option("--sketch", ev_sketch, "source drawing (default: synthetic)")
      ->check(CLI::ExistingFile);
  eval->add_option("--grid", ev_grid, "grid JSON")->check(CLI::ExistingFile);
  eval->add_option("--out", ev_out)->required();
  eval->add_option("--size", ev_size, "synthetic drawing side");
  add_sketch_flags(eval);

  auto* render = app.add_subcommand("render", "16-bit depth PNG + texture -> OBJ/MTL");
  std::string rd_depth, rd_tex, rd_out;
  std::optional<double> relief;
  render->add_option("depth", rd_depth)->required()->check(CLI::ExistingFile);
  render->add_option("texture", rd_tex)->required()->check(CLI::ExistingFile);
  render->add_option("--out", rd_out, "output .obj path")->required();
  render->add_option("--relief", relief, "depth relief (default 0.3)");

  auto* pipeline = app.add_subcommand("pipeline", "drawings -> stitched -> styled -> depth -> mesh");
  std::vector<std::string> pl_in;
  std::string pl_work, pl_style, pl_depth;
  std::optional<int> fine_size;
  pipeline->add_option("images", pl_in)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--work", pl_work, "directory for stage files")->required();
  pipeline->add_option("--style-adapter", pl_style, "style adapter executable");
  pipeline->add_option("--depth-adapter", pl_depth, "depth adapter executable");
  pipeline->add_option("--fine-size", fine_size, "square size fed to the style adapter");
  pipeline->add_option("--relief", relief, "depth relief (default 0.3)");
  auto* no_pre = pipeline->add_flag("--no-preprocess", "skip the sketch filter before styling");
  add_sketch_flags(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalidInput;
  }

  try {
    AppConfig base;
    base.pipeline.style.executable = SelfDirectory() / "sketch3d-style-identity";
    base.pipeline.depth.executable = SelfDirectory() / "sketch3d-depth-gradient";
    AppConfig cfg = config_path.empty() ? ParseConfig(Json::object(), base)
                                        : LoadConfig(config_path, base);
    if (seed_opt->count() > 0) {
      cfg.seed = seed;
      cfg.stitch.ransac.seed = seed;
      cfg.pipeline.stitch.ransac.seed = seed;
    }
    if (blur_sigma) cfg.sketch.blur_sigma = *blur_sigma;
    if (hp_sigma) cfg.sketch.highpass_sigma = *hp_sigma;
    if (hp_offset) cfg.sketch.highpass_offset = *hp_offset;
    cfg.pipeline.sketch_params = cfg.sketch;
    if (max_features) cfg.stitch.max_features = *max_features;

    if (*sketchify) {
      WriteImage(sk_out, Sketchify(ReadImage(sk_in), cfg.sketch));
    } else if (*features) {
      const Image img = ToGrayscale(ReadImage(ft_in));
      const auto feats = DetectAndDescribe(img, cfg.stitch.max_features);
      WriteJson(ft_out, FeaturesToJson(feats, img.width(), img.height()));
    } else if (*warp) {
      const WarpResult r = WarpImage(ReadImage(wp_in), HomographyFromJson(ReadJson(wp_h)));
      WriteImage(wp_out, r.image);
      if (!wp_cov.empty()) WriteImage(wp_cov, r.coverage);
      std::cout << "offset " << r.offset_x << " " << r.offset_y << "\n";
    } else if (*stitch) {
      std::vector<Image> drawings;
      for (const auto& p : st_in) drawings.push_back(ReadImage(p));
      const StitchManyResult r = StitchMany(drawings, cfg.stitch);
      WriteImage(st_out, r.final.canvas);
      if (!st_report.empty()) WriteJson(st_report, StitchReportToJson(r));
    } else if (*dataset) {
      ds_opts.seed = cfg.seed;
      ds_opts.sketch_params = cfg.sketch;
      const DatasetManifest m = BuildDataset(ds_corpus, ds_out, ds_opts);
      std::cout << "trainA " << m.train_a.size() << ", trainB " << m.train_b.size()
                << ", overlap " << m.actual_overlap << " (expected " << m.expected_overlap
                << "), skipped " << m.skipped.size() << "\n";
    } else if (*toygen) {
      fs::create_directories(tg_out);
      Image source;
      if (tg_sketch.empty()) {
        source = SyntheticDrawing(tg_size, tg_size, cfg.seed);
        WriteImage(fs::path(tg_out) / "source.png", source);
      } else {
        source = ReadImage(tg_sketch);
      }
      if (*tg_render) source = Sketchify(source, cfg.sketch);
      const ToyPair pair = MakeToyPair(source, tg_overlap, tg_shift, cfg.seed);
      WriteImage(fs::path(tg_out) / "left.png", pair.left);
      WriteImage(fs::path(tg_out) / "right.png", pair.right);
      WriteImage(fs::path(tg_out) / "right_coverage.png", pair.right_coverage);
      WriteJson(fs::path(tg_out) / "truth.json",
                Json{{"true_h", HomographyToJson(pair.true_h)},
                     {"maps", "right -> left"},
                     {"overlap_fraction", pair.overlap_fraction},
                     {"max_corner_shift", pair.max_corner_shift},
                     {"seed", pair.seed},
                     {"source_width", pair.source_width},
                     {"piece_width", pair.piece_width}});
    } else if (*eval) {
      const Image source =
          ev_sketch.empty() ? SyntheticDrawing(ev_size, ev_size, cfg.seed) : ReadImage(ev_sketch);
      const SweepGrid grid =
          ev_grid.empty() ? ParseGrid(Json::object(), cfg.seed) : ParseGrid(ReadJson(ev_grid), cfg.seed);
      WriteFileAtomic(ev_out, ToCsv(Sweep(source, grid, cfg.sketch, cfg.stitch)));
    } else if (*render) {
      const DepthMap depth = DepthFromPng16(ReadPng16(rd_depth));
      Image texture = ReadImage(rd_tex);
      if (texture.width() != depth.width || texture.height() != depth.height) {
        texture = Resize(texture, depth.width, depth.height);
      }
      const ObjFiles files =
          ExportObj(DepthToMesh(depth, texture, relief.value_or(cfg.pipeline.relief)), rd_out);
      std::cout << files.obj.string() << "\n";
    } else if (*pipeline) {
      if (!pl_style.empty()) cfg.pipeline.style.executable = pl_style;
      if (!pl_depth.empty()) cfg.pipeline.depth.executable = pl_depth;
      if (fine_size) cfg.pipeline.fine_size = *fine_size;
      if (relief) cfg.pipeline.relief = *relief;
      if (*no_pre) cfg.pipeline.preprocess_sketch = false;
      cfg.pipeline.stitch = cfg.stitch;
      std::vector<Image> drawings;
      for (const auto& p : pl_in) drawings.push_back(ReadImage(p));
      const PipelineOutputs out = RunPipeline(drawings, cfg.pipeline, pl_work);
      std::cout << out.mesh.obj.string() << "\n";
    }
  } catch (const StitchFailure& e) {
    std::cerr << "stitch failure: " << e.what() << " (stage-1 matches " << e.stage1_matches()
              << ", stage-2 matches " << e.stage2_matches() << ")\n"
              << "hint: run the pipeline on a single drawing to skip stitching\n";
    return kExitStitchFailure;
  } catch (const AdapterFailure& e) {
    std::cerr << "adapter failure: " << e.what() << "\n";
    if (!e.diagnostics().empty()) std::cerr << "--- adapter output ---\n" << e.diagnostics() << "\n";
    return kExitAdapterFailure;
  } catch (const Error& e) {
    std::cerr << ToString(e.code()) << ": " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return 0;
}
