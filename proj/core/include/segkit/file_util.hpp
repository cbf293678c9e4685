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

#include <filesystem>
#include <string>
#include <string_view>

namespace segkit {

std::string read_file(const std::filesystem::path& path);

/// Writes `bytes` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace segkit
