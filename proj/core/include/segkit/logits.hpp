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

// Per-pixel class scores and the SGLT interchange file.
//
// SGLT layout (all little-endian): the four bytes "SGLT", u32 version (= 1),
// u32 height, u32 width, u32 classes, then classes * height * width IEEE-754
// float32 values in planar class-major order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace segkit {

struct LogitMap {
  int width = 0;
  int height = 0;
  int classes = 0;
  std::vector<float> data;  // [class][y][x]

  LogitMap() = default;
  LogitMap(int w, int h, int c, float fill = 0.0f)
      : width(w),
        height(h),
        classes(c),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {}

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  const float* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  float& at(int c, int y, int x) {
    return plane(c)[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  float at(int c, int y, int x) const {
    return plane(c)[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }

  bool operator==(const LogitMap&) const = default;
};

inline constexpr std::uint32_t kSgltVersion = 1;

std::string encode_sglt(const LogitMap& logits);
/// ParseError on a bad header or length, DataError on non-finite values.
LogitMap decode_sglt(std::string_view bytes);

LogitMap read_sglt(const std::filesystem::path& path);
void write_sglt(const std::filesystem::path& path, const LogitMap& logits);

}  // namespace segkit
