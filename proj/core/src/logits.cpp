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

#include "segkit/logits.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "segkit/errors.hpp"
#include "segkit/file_util.hpp"

namespace segkit {
namespace {

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t GetU32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)])) << (8 * i);
  }
  return v;
}

constexpr std::size_t kHeaderSize = 20;

}  // namespace

std::string encode_sglt(const LogitMap& logits) {
  if (logits.width <= 0 || logits.height <= 0 || logits.classes <= 0) {
    throw ArgumentError("cannot encode an empty logit map");
  }
  if (logits.data.size() != logits.plane_size() * static_cast<std::size_t>(logits.classes)) {
    throw ArgumentError("logit map data length does not match its dimensions");
  }
  std::string out = "SGLT";
  out.reserve(kHeaderSize + logits.data.size() * 4);
  PutU32(out, kSgltVersion);
  PutU32(out, static_cast<std::uint32_t>(logits.height));
  PutU32(out, static_cast<std::uint32_t>(logits.width));
  PutU32(out, static_cast<std::uint32_t>(logits.classes));
  for (float f : logits.data) PutU32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

LogitMap decode_sglt(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, 4) != "SGLT") {
    throw ParseError("not an SGLT file (bad magic)");
  }
  const std::uint32_t version = GetU32(bytes, 4);
  if (version != kSgltVersion) throw ParseError("unsupported SGLT version " + std::to_string(version));
  const std::uint32_t h = GetU32(bytes, 8);
  const std::uint32_t w = GetU32(bytes, 12);
  const std::uint32_t c = GetU32(bytes, 16);
  if (h == 0 || w == 0 || c == 0 || h > 0x7FFFFFFF || w > 0x7FFFFFFF || c > 0x7FFFFFFF) {
    throw ParseError("SGLT dimensions must be positive");
  }
  const std::uint64_t count = std::uint64_t{h} * w * c;
  if ((bytes.size() - kHeaderSize) / 4 != count || (bytes.size() - kHeaderSize) % 4 != 0) {
    throw ParseError("SGLT payload has " + std::to_string(bytes.size() - kHeaderSize) +
                     " bytes, expected " + std::to_string(count * 4));
  }
  LogitMap out(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const float f = std::bit_cast<float>(GetU32(bytes, kHeaderSize + 4 * i));
    if (!std::isfinite(f)) throw DataError("SGLT value " + std::to_string(i) + " is not finite");
    out.data[i] = f;
  }
  return out;
}

LogitMap read_sglt(const std::filesystem::path& path) {
  try {
    return decode_sglt(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

void write_sglt(const std::filesystem::path& path, const LogitMap& logits) {
  write_file_atomic(path, encode_sglt(logits));
}

}  // namespace segkit
