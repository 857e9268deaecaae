#include "sketch3d/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <set>

#include "sketch3d/error.hpp"
#include "sketch3d/image_io.hpp"
#include "sketch3d/random.hpp"

namespace sketch3d {
namespace {

namespace fs = std::filesystem;

// Decorrelates the two subset streams drawn from one user seed.
std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string OutputName(const char* dir, std::size_t position, const fs::path& source) {
  char prefix[32];
  std::snprintf(prefix, sizeof(prefix), "%04zu_", position);
  return std::string(dir) + "/" + prefix + source.stem().string() + ".png";
}

}  // namespace

double CropFraction(int resize_to, int crop_size) {
  if (resize_to < 1 || crop_size < 1 || crop_size > resize_to) {
    throw Error(ErrorCode::kInvalidParameter,
                "crop size must be in [1, resize_to], got " + std::to_string(crop_size) +
                    " for " + std::to_string(resize_to));
  }
  const double ratio = static_cast<double>(crop_size) / resize_to;
  return 1.0 - ratio * ratio;
}

double ExpectedSubsetOverlap(int corpus_size, int subset_size) {
  if (corpus_size < 1 || subset_size < 0 || subset_size > corpus_size) {
    throw Error(ErrorCode::kInvalidParameter, "subset size must be in [0, corpus size]");
  }
  return static_cast<double>(subset_size) * subset_size / corpus_size;
}

std::vector<int> DrawSubset(int corpus_size, int subset_size, std::uint64_t seed) {
  if (subset_size < 0 || subset_size > corpus_size) {
    throw Error(ErrorCode::kInsufficientData,
                "cannot draw " + std::to_string(subset_size) + " items from " +
                    std::to_string(corpus_size));
  }
  std::vector<int> order(corpus_size);
  for (int i = 0; i < corpus_size; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  order.resize(subset_size);
  return order;
}

Image ResizeShortSide(const Image& img, int short_side) {
  if (short_side < 1) throw Error(ErrorCode::kInvalidParameter, "short side must be >= 1");
  if (img.width() <= img.height()) {
    const int h = static_cast<int>(
        std::lround(static_cast<double>(img.height()) * short_side / img.width()));
    return Resize(img, short_side, std::max(1, h));
  }
  const int w = static_cast<int>(
      std::lround(static_cast<double>(img.width()) * short_side / img.height()));
  return Resize(img, std::max(1, w), short_side);
}

DatasetManifest BuildDataset(const fs::path& corpus_dir, const fs::path& out_dir,
                             const DatasetOptions& options) {
  options.sketch_params.Validate();
  DatasetManifest manifest;
  manifest.options = options;
  manifest.discard_fraction = CropFraction(options.resize_to, options.crop_size);
  if (options.subset_size < 1) {
    throw Error(ErrorCode::kInvalidParameter, "subset size must be >= 1");
  }

  std::error_code ec;
  if (!fs::is_directory(corpus_dir, ec)) {
    throw Error(ErrorCode::kIo, "corpus directory not found: " + corpus_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::vector<fs::path> usable;
  for (const auto& f : files) {
    try {
      (void)ReadImage(f);
      usable.push_back(f);
    } catch (const Error& e) {
      std::cerr << "warning: skipping " << f.filename().string() << ": " << e.what() << "\n";
      manifest.skipped.push_back(f.filename().string());
    }
  }
  manifest.corpus_size = static_cast<int>(usable.size());
  if (manifest.corpus_size < options.subset_size) {
    throw Error(ErrorCode::kInsufficientData,
                "corpus has " + std::to_string(manifest.corpus_size) +
                    " decodable images, need " + std::to_string(options.subset_size));
  }
  manifest.expected_overlap = ExpectedSubsetOverlap(manifest.corpus_size, options.subset_size);

  const std::vector<int> photo_subset =
      DrawSubset(manifest.corpus_size, options.subset_size, SplitMix(options.seed));
  const std::vector<int> sketch_subset =
      DrawSubset(manifest.corpus_size, options.subset_size, SplitMix(options.seed ^ 0x5ce7c4ULL));
  const std::set<int> photo_set(photo_subset.begin(), photo_subset.end());
  manifest.actual_overlap = static_cast<int>(std::count_if(
      sketch_subset.begin(), sketch_subset.end(), [&](int i) { return photo_set.count(i) > 0; }));

  fs::create_directories(out_dir / "trainA");
  fs::create_directories(out_dir / "trainB");
  for (std::size_t k = 0; k < sketch_subset.size(); ++k) {
    const fs::path& src = usable[sketch_subset[k]];
    const Image resized = ResizeShortSide(ReadImage(src), options.resize_to);
    DatasetEntry entry{src.filename().string(), OutputName("trainA", k, src)};
    WriteImage(out_dir / entry.output, Sketchify(resized, options.sketch_params));
    manifest.train_a.push_back(std::move(entry));
  }
  for (std::size_t k = 0; k < photo_subset.size(); ++k) {
    const fs::path& src = usable[photo_subset[k]];
    DatasetEntry entry{src.filename().string(), OutputName("trainB", k, src)};
    WriteImage(out_dir / entry.output, ResizeShortSide(ReadImage(src), options.resize_to));
    manifest.train_b.push_back(std::move(entry));
  }
  WriteFileAtomic(out_dir / "manifest.json", ManifestToJson(manifest));
  return manifest;
}

std::string ManifestToJson(const DatasetManifest& m) {
  using nlohmann::ordered_json;
  auto entries = [](const std::vector<DatasetEntry>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : list) arr.push_back({{"source", e.source}, {"output", e.output}});
    return arr;
  };
  ordered_json j;
  j["corpus_size"] = m.corpus_size;
  j["subset_size"] = m.options.subset_size;
  j["seed"] = m.options.seed;
  j["resize_to"] = m.options.resize_to;
  j["crop_size"] = m.options.crop_size;
  j["discard_fraction"] = m.discard_fraction;
  j["expected_overlap"] = m.expected_overlap;
  j["actual_overlap"] = m.actual_overlap;
  j["sketch_params"] = {{"blur_sigma", m.options.sketch_params.blur_sigma},
                        {"dodge_scale", m.options.sketch_params.dodge_scale},
                        {"highpass_sigma", m.options.sketch_params.highpass_sigma},
                        {"highpass_offset", m.options.sketch_params.highpass_offset}};
  j["training_config"] = {{"epochs", m.options.training.epochs},
                          {"lr", m.options.training.lr},
                          {"lr_decay_start_epoch", m.options.training.lr_decay_start_epoch},
                          {"test_fine_size", m.options.training.test_fine_size}};
  j["trainA"] = entries(m.train_a);
  j["trainB"] = entries(m.train_b);
  j["skipped"] = m.skipped;
  return j.dump(2) + "\n";
}

}  // namespace sketch3d
