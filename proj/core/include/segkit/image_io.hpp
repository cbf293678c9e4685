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

#pragma once

// PNG/JPEG codecs for masks and images, backed by libpng and libjpeg.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "segkit/image.hpp"
#include "segkit/label_space.hpp"

namespace segkit {

struct ImageSize {
  int width = 0;
  int height = 0;

  bool operator==(const ImageSize&) const = default;
};

/// Reads an 8-bit single-channel (grayscale or palette-index) PNG. Any other
/// pixel format is a DataError; unreadable files are IoError.
MaskImage read_mask_png(const std::filesystem::path& path, std::string space = {});

/// Encodes a mask as 8-bit grayscale PNG. Level 1 zlib compression keeps
/// batch remapping fast.
std::string encode_mask_png(const MaskImage& mask, int compression_level = 1);

/// Writes via temp file + rename.
void write_mask_png(const std::filesystem::path& path, const MaskImage& mask);

/// Reads PNG (any 8-bit colour type) or JPEG into RGB.
ImageBuffer read_image(const std::filesystem::path& path);

std::string encode_image_png(const ImageBuffer& image, int compression_level = 1);
void write_image_png(const std::filesystem::path& path, const ImageBuffer& image);

/// Dimensions from the file header only. nullopt for unrecognized formats.
std::optional<ImageSize> read_image_size(const std::filesystem::path& path);

}  // namespace segkit
