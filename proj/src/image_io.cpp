#include "sketch3d/image_io.hpp"

#include <png.h>
#include <unistd.h>

#include <csetjmp>
#include <cstdio>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

// jpeglib.h expects FILE and size_t to be declared first.
#include <jpeglib.h>

#include "sketch3d/error.hpp"

namespace sketch3d {
namespace {

namespace fs = std::filesystem;

bool IsPng(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool IsJpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
         bytes[2] == 0xFF;
}

struct MemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void ReadFromMemory(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + length > reader->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, reader->bytes.data() + reader->offset, length);
  reader->offset += length;
}

void WriteToMemory(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void FlushNoop(png_structp) {}

void PngWarning(png_structp, png_const_charp) {}

// Everything libpng touches after setjmp lives in this struct so a longjmp
// never skips a C++ destructor.
struct PngDecodeState {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  char message[256] = {0};
};

void PngError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngDecodeState*>(png_get_error_ptr(png));
  if (state != nullptr) std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

// keep_16 == true requests raw 16-bit samples (gray only).
bool DecodePngRaw(std::span<const std::uint8_t> bytes, bool keep_16,
                  PngDecodeState& state) {
  MemoryReader reader{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                           PngError, PngWarning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, ReadFromMemory);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) {
    if (keep_16) {
      png_set_swap(png);
    } else {
      png_set_scale_16(png);
    }
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  state.width = static_cast<int>(png_get_image_width(png, info));
  state.height = static_cast<int>(png_get_image_height(png, info));
  state.channels = png_get_channels(png, info);
  state.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  state.pixels.resize(row_bytes * state.height);
  state.rows.resize(state.height);
  for (int y = 0; y < state.height; ++y) {
    state.rows[y] = state.pixels.data() + row_bytes * y;
  }
  png_read_image(png, state.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct PngEncodeState {
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows;
  char message[256] = {0};
};

void PngEncodeError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngEncodeState*>(png_get_error_ptr(png));
  if (state != nullptr) std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

bool EncodePngRaw(int width, int height, int color_type, int bit_depth,
                  PngEncodeState& state) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state,
                                            PngEncodeError, PngWarning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &state.out, WriteToMemory, FlushNoop);
  // Fixed settings keep the encoded bytes reproducible.
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, state.rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct JpegErrorState {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = {0};
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, state->message);
  std::longjmp(state->jump, 1);
}

struct JpegDecodeState {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

bool DecodeJpegRaw(std::span<const std::uint8_t> bytes, JpegDecodeState& out,
                   JpegErrorState& err) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      cinfo.jpeg_color_space == JCS_GRAYSCALE ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.channels = cinfo.output_components;
  const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
  out.pixels.resize(stride * out.height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

struct JpegEncodeState {
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
};

bool EncodeJpegRaw(const Image& img, int quality, JpegEncodeState& out,
                   JpegErrorState& err) {
  jpeg_compress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out.buffer, &out.size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  while (cinfo.next_scanline < cinfo.image_height) {
    // libjpeg takes non-const rows but does not write through them.
    auto* row = const_cast<JSAMPLE*>(img.data().data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

std::string ExtensionLower(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

Image DecodeImage(std::span<const std::uint8_t> bytes) {
  if (IsPng(bytes)) {
    PngDecodeState state;
    if (!DecodePngRaw(bytes, false, state)) {
      throw Error(ErrorCode::kIo, std::string("PNG decode failed: ") + state.message);
    }
    if (state.channels == 1 || state.channels == 3) {
      return Image(state.width, state.height, state.channels, std::move(state.pixels));
    }
    throw Error(ErrorCode::kIo, "unsupported PNG channel layout");
  }
  if (IsJpeg(bytes)) {
    JpegDecodeState state;
    JpegErrorState err;
    if (!DecodeJpegRaw(bytes, state, err)) {
      throw Error(ErrorCode::kIo, std::string("JPEG decode failed: ") + err.message);
    }
    return Image(state.width, state.height, state.channels, std::move(state.pixels));
  }
  throw Error(ErrorCode::kIo, "unrecognized image format (expected PNG or JPEG)");
}

Image ReadImage(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodeImage(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> EncodePng(const Image& img) {
  PngEncodeState state;
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  state.rows.resize(img.height());
  for (int y = 0; y < img.height(); ++y) {
    state.rows[y] = const_cast<png_bytep>(img.data().data() + stride * y);
  }
  const int color_type = img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  if (!EncodePngRaw(img.width(), img.height(), color_type, 8, state)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + state.message);
  }
  return std::move(state.out);
}

std::vector<std::uint8_t> EncodeJpeg(const Image& img, int quality) {
  JpegEncodeState state;
  JpegErrorState err;
  const bool ok = EncodeJpegRaw(img, quality, state, err);
  std::vector<std::uint8_t> out;
  if (state.buffer != nullptr) {
    out.assign(state.buffer, state.buffer + state.size);
    std::free(state.buffer);
  }
  if (!ok) throw Error(ErrorCode::kIo, std::string("JPEG encode failed: ") + err.message);
  return out;
}

void WriteImage(const fs::path& path, const Image& img) {
  const std::string ext = ExtensionLower(path);
  if (ext == ".jpg" || ext == ".jpeg") {
    WriteFileAtomic(path, EncodeJpeg(img));
  } else {
    WriteFileAtomic(path, EncodePng(img));
  }
}

std::vector<std::uint8_t> EncodePng16(const Gray16Image& img) {
  if (img.width < 1 || img.height < 1 ||
      img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorCode::kInvalidParameter, "malformed 16-bit image");
  }
  PngEncodeState state;
  state.rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) {
    state.rows[y] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(img.data.data() + static_cast<std::size_t>(img.width) * y));
  }
  if (!EncodePngRaw(img.width, img.height, PNG_COLOR_TYPE_GRAY, 16, state)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + state.message);
  }
  return std::move(state.out);
}

Gray16Image DecodePng16(std::span<const std::uint8_t> bytes) {
  if (!IsPng(bytes)) throw Error(ErrorCode::kIo, "not a PNG stream");
  PngDecodeState state;
  if (!DecodePngRaw(bytes, true, state)) {
    throw Error(ErrorCode::kIo, std::string("PNG decode failed: ") + state.message);
  }
  if (state.channels != 1 || state.bit_depth != 16) {
    throw Error(ErrorCode::kIo, "expected single-channel 16-bit PNG");
  }
  Gray16Image out;
  out.width = state.width;
  out.height = state.height;
  out.data.resize(static_cast<std::size_t>(out.width) * out.height);
  std::memcpy(out.data.data(), state.pixels.data(), out.data.size() * 2);
  return out;
}

Gray16Image ReadPng16(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodePng16(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WritePng16(const fs::path& path, const Gray16Image& img) {
  WriteFileAtomic(path, EncodePng16(img));
}

PngInfo ProbePng(std::span<const std::uint8_t> bytes) {
  // IHDR is always the first chunk: signature(8) length(4) type(4) data(13).
  if (!IsPng(bytes) || bytes.size() < 33 ||
      std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::kIo, "not a PNG stream");
  }
  auto be32 = [&](std::size_t at) {
    return (static_cast<std::uint32_t>(bytes[at]) << 24) |
           (static_cast<std::uint32_t>(bytes[at + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[at + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[at + 3]);
  };
  PngInfo info;
  info.width = static_cast<int>(be32(16));
  info.height = static_cast<int>(be32(20));
  info.bit_depth = bytes[24];
  switch (bytes[25]) {
    case 0: info.channels = 1; break;
    case 2: info.channels = 3; break;
    case 3: info.channels = 3; break;
    case 4: info.channels = 1; info.has_alpha = true; break;
    case 6: info.channels = 3; info.has_alpha = true; break;
    default: throw Error(ErrorCode::kIo, "invalid PNG color type");
  }
  return info;
}

PngInfo ProbePng(const fs::path& path) { return ProbePng(ReadFileBytes(path)); }

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileAtomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

void WriteFileAtomic(const fs::path& path, const std::string& text) {
  WriteFileAtomic(path, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace sketch3d
