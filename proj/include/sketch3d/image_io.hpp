#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sketch3d/image.hpp"

namespace sketch3d {

// Single-channel 16-bit raster; the depth exchange format.
struct Gray16Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  // Color channels after dropping alpha (1 gray, 3 RGB/palette).
  int channels = 0;
  bool has_alpha = false;
};

// Decodes PNG or JPEG (sniffed from the leading bytes). Alpha is dropped,
// palettes are expanded, 16-bit samples are reduced to 8 bits.
Image DecodeImage(std::span<const std::uint8_t> bytes);
Image ReadImage(const std::filesystem::path& path);

std::vector<std::uint8_t> EncodePng(const Image& img);
std::vector<std::uint8_t> EncodeJpeg(const Image& img, int quality = 95);

// Chooses JPEG for .jpg/.jpeg extensions and PNG otherwise. The file is
// written to a temporary sibling and renamed into place.
void WriteImage(const std::filesystem::path& path, const Image& img);

std::vector<std::uint8_t> EncodePng16(const Gray16Image& img);
Gray16Image DecodePng16(std::span<const std::uint8_t> bytes);
Gray16Image ReadPng16(const std::filesystem::path& path);
void WritePng16(const std::filesystem::path& path, const Gray16Image& img);

PngInfo ProbePng(std::span<const std::uint8_t> bytes);
PngInfo ProbePng(const std::filesystem::path& path);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

// Writes to "<path>.tmp.<pid>" then renames, so readers never observe a
// truncated file.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, const std::string& text);

}  // namespace sketch3d
