// Copyright 2026 The segkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segkit/image_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "segkit/errors.hpp"
#include "segkit/file_util.hpp"

namespace segkit {
namespace {

bool IsPng(std::string_view bytes) {
  return bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

bool IsJpeg(std::string_view bytes) {
  return bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
         static_cast<unsigned char>(bytes[1]) == 0xD8 && static_cast<unsigned char>(bytes[2]) == 0xFF;
}

struct ReadCursor {
  std::string_view bytes;
  std::size_t pos = 0;
};

void ReadFromCursor(png_structp png, png_bytep out, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + n > cur->bytes.size()) png_error(png, "truncated PNG file");
  std::memcpy(out, cur->bytes.data() + cur->pos, n);
  cur->pos += n;
}

void WriteToString(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), n);
}

void FlushNothing(png_structp) {}

struct PngErrorSink {
  std::string message;
};

[[noreturn]] void RecordPngError(png_structp png, png_const_charp msg) {
  if (auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png))) sink->message = msg;
  png_longjmp(png, 1);
}
void IgnorePngWarning(png_structp, png_const_charp) {}

struct PngReadHandle {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngErrorSink sink;
  PngReadHandle() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, RecordPngError, IgnorePngWarning);
    if (!png) throw IoError("png_create_read_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_read_struct(&png, nullptr, nullptr);
      throw IoError("png_create_info_struct failed");
    }
  }
  ~PngReadHandle() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReadHandle(const PngReadHandle&) = delete;
  PngReadHandle& operator=(const PngReadHandle&) = delete;
};

struct PngWriteHandle {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngErrorSink sink;
  PngWriteHandle() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, RecordPngError, IgnorePngWarning);
    if (!png) throw IoError("png_create_write_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw IoError("png_create_info_struct failed");
    }
  }
  ~PngWriteHandle() { png_destroy_write_struct(&png, &info); }
  PngWriteHandle(const PngWriteHandle&) = delete;
  PngWriteHandle& operator=(const PngWriteHandle&) = delete;
};

// libpng errors longjmp back here. Every object with a destructor is created
// before setjmp so none is skipped.
std::string EncodePng(int width, int height, int color_type, int channels,
                      const std::uint8_t* data, int level) {
  PngWriteHandle h;
  std::string out;
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  if (setjmp(png_jmpbuf(h.png))) throw DataError("PNG encode failed: " + h.sink.message);
  png_set_write_fn(h.png, &out, WriteToString, FlushNothing);
  png_set_IHDR(h.png, h.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(h.png, level);
  if (level <= 1) png_set_filter(h.png, 0, PNG_FILTER_NONE);
  png_write_info(h.png, h.info);
  for (int y = 0; y < height; ++y) {
    png_write_row(h.png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * stride));
  }
  png_write_end(h.png, nullptr);
  return out;
}

ImageBuffer DecodePngRgb(std::string_view bytes, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DataError("'" + path.string() + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  ImageBuffer out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw DataError("'" + path.string() + "': " + image.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Decoding state lives in a plain struct so that nothing with a destructor is
// skipped by longjmp.
bool DecodeJpegInto(std::string_view bytes, bool header_only, ImageBuffer* out,
                    char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
               static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  out->width = static_cast<int>(cinfo.image_width);
  out->height = static_cast<int>(cinfo.image_height);
  if (!header_only) {
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = out->data.data() + static_cast<std::size_t>(cinfo.output_scanline) * stride;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  return true;
}

ImageBuffer DecodeJpeg(std::string_view bytes, const std::filesystem::path& path) {
  char message[JMSG_LENGTH_MAX] = {0};
  ImageBuffer header;
  if (!DecodeJpegInto(bytes, true, &header, message)) {
    throw DataError("'" + path.string() + "': " + message);
  }
  ImageBuffer out(header.width, header.height);
  if (!DecodeJpegInto(bytes, false, &out, message)) {
    throw DataError("'" + path.string() + "': " + message);
  }
  return out;
}

}  // namespace

MaskImage read_mask_png(const std::filesystem::path& path, std::string space) {
  const std::string bytes = read_file(path);
  if (!IsPng(bytes)) throw DataError("'" + path.string() + "' is not a PNG file");
  PngReadHandle h;
  ReadCursor cursor{bytes, 0};
  MaskImage mask;
  mask.space = std::move(space);
  const char* format_problem = nullptr;
  if (setjmp(png_jmpbuf(h.png))) {
    throw DataError("'" + path.string() + "': " + h.sink.message);
  }
  png_set_read_fn(h.png, &cursor, ReadFromCursor);
  png_read_info(h.png, h.info);
  {
    const int color = png_get_color_type(h.png, h.info);
    const int depth = png_get_bit_depth(h.png, h.info);
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
      format_problem = "mask must be a single-channel (grayscale or palette) PNG";
    } else if (depth == 16) {
      format_problem = "16-bit masks are not supported";
    } else if (depth < 8) {
      png_set_packing(h.png);
    }
  }
  if (format_problem) throw DataError("'" + path.string() + "': " + format_problem);
  png_read_update_info(h.png, h.info);
  mask.width = static_cast<int>(png_get_image_width(h.png, h.info));
  mask.height = static_cast<int>(png_get_image_height(h.png, h.info));
  mask.data.resize(static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height));
  for (int y = 0; y < mask.height; ++y) {
    png_read_row(h.png, mask.data.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(mask.width),
                 nullptr);
  }
  png_read_end(h.png, nullptr);
  return mask;
}

std::string encode_mask_png(const MaskImage& mask, int compression_level) {
  if (mask.width <= 0 || mask.height <= 0) throw ArgumentError("cannot encode an empty mask");
  return EncodePng(mask.width, mask.height, PNG_COLOR_TYPE_GRAY, 1, mask.data.data(),
                   compression_level);
}

void write_mask_png(const std::filesystem::path& path, const MaskImage& mask) {
  write_file_atomic(path, encode_mask_png(mask));
}

ImageBuffer read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (IsPng(bytes)) return DecodePngRgb(bytes, path);
  if (IsJpeg(bytes)) return DecodeJpeg(bytes, path);
  throw DataError("'" + path.string() + "' is neither PNG nor JPEG");
}

std::string encode_image_png(const ImageBuffer& image, int compression_level) {
  if (image.width <= 0 || image.height <= 0) throw ArgumentError("cannot encode an empty image");
  return EncodePng(image.width, image.height, PNG_COLOR_TYPE_RGB, 3, image.data.data(),
                   compression_level);
}

void write_image_png(const std::filesystem::path& path, const ImageBuffer& image) {
  write_file_atomic(path, encode_image_png(image));
}

std::optional<ImageSize> read_image_size(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  unsigned char head[24] = {0};
  const std::size_t got = std::fread(head, 1, sizeof(head), f);
  std::fclose(f);
  const std::string_view view(reinterpret_cast<const char*>(head), got);
  if (IsPng(view) && got >= 24) {
    auto be32 = [&](int off) {
      return (std::uint32_t{head[off]} << 24) | (std::uint32_t{head[off + 1]} << 16) |
             (std::uint32_t{head[off + 2]} << 8) | std::uint32_t{head[off + 3]};
    };
    return ImageSize{static_cast<int>(be32(16)), static_cast<int>(be32(20))};
  }
  if (IsJpeg(view)) {
    const std::string bytes = read_file(path);
    ImageBuffer header;
    char message[JMSG_LENGTH_MAX] = {0};
    if (!DecodeJpegInto(bytes, true, &header, message)) return std::nullopt;
    return ImageSize{header.width, header.height};
  }
  return std::nullopt;
}

}  // namespace segkit
