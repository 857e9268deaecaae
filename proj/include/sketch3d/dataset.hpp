#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sketch3d/sketch.hpp"

namespace sketch3d {

// Hyperparameters handed to the external unpaired-translation trainer.
struct TrainingConfig {
  int epochs = 200;
  double lr = 0.0002;
  // Learning rate decays linearly to zero from this epoch on.
  int lr_decay_start_epoch = 100;
  int test_fine_size = 480;
};

struct DatasetOptions {
  int subset_size = 600;
  std::uint64_t seed = 0;
  // Short side of stored images.
  int resize_to = 400;
  // Random-crop size the trainer should use.
  int crop_size = 320;
  SketchParams sketch_params;
  TrainingConfig training;
};

struct DatasetEntry {
  // File name inside the corpus directory.
  std::string source;
  // Path relative to the output directory.
  std::string output;
};

struct DatasetManifest {
  DatasetOptions options;
  int corpus_size = 0;
  double discard_fraction = 0.0;
  double expected_overlap = 0.0;
  int actual_overlap = 0;
  // trainA: sketchified sources; trainB: untouched (resized) photos.
  std::vector<DatasetEntry> train_a;
  std::vector<DatasetEntry> train_b;
  std::vector<std::string> skipped;
};

// Fraction of pixels a crop_size square crop discards from a resize_to square.
double CropFraction(int resize_to, int crop_size);

// Expected size of the intersection of two independent uniform k-subsets of
// an n-element set (hypergeometric mean k*k/n).
double ExpectedSubsetOverlap(int corpus_size, int subset_size);

// Seeded uniform subset without replacement, in seeded order.
std::vector<int> DrawSubset(int corpus_size, int subset_size, std::uint64_t seed);

// Scales so the shorter side equals `short_side`, keeping aspect ratio.
Image ResizeShortSide(const Image& img, int short_side);

DatasetManifest BuildDataset(const std::filesystem::path& corpus_dir,
                             const std::filesystem::path& out_dir,
                             const DatasetOptions& options);

std::string ManifestToJson(const DatasetManifest& manifest);

}  // namespace sketch3d
