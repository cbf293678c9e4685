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

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "cli.hpp"
#include "segkit/errors.hpp"
#include "segkit/file_util.hpp"

namespace segkit::cli {

Catalog Context::catalog() const {
  if (global.catalog_path.empty()) return builtin_catalog();
  return load_catalog(read_file(global.catalog_path));
}

LabelSpace Context::unified_space() const {
  if (global.unified_path.empty()) return generic_unified_space();
  return parse_label_space(read_file(global.unified_path), "unified");
}

std::filesystem::path Context::mapping_path(const DatasetDescriptor& desc) const {
  std::filesystem::path dir = global.mapping_dir.empty() ? "." : global.mapping_dir;
  return dir / desc.mapping_file;
}

std::filesystem::path Context::output(const std::string& path) const {
  std::filesystem::path p(path);
  if (global.output_dir.empty() || p.is_absolute()) return p;
  return std::filesystem::path(global.output_dir) / p;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(n, 1, std::max(1u, threads)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(mu);
        if (i > failed_at) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LoadedMapping load_mapping(const std::filesystem::path& path, const LabelSpace& unified,
                           const std::string& overlay_path) {
  const std::string text = read_file(path);
  const std::string dataset = path.stem().string();
  try {
    LabelSpace source = infer_source_space(text, dataset);
    MappingTable table = parse_mapping(text, source, unified);
    if (!overlay_path.empty()) {
      table = apply_overlay(table, read_file(overlay_path), source, unified);
    }
    return LoadedMapping{dataset, std::move(source), unified, std::move(table)};
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": invalid mapping", e.details());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  write_file_atomic(path, text);
}

void warn(const std::string& message) { std::cerr << "segkit: " << message << '\n'; }

Manifest load_manifests(const std::vector<std::string>& paths) {
  Manifest all;
  for (const auto& p : paths) {
    try {
      all = Manifest::concat(all, Manifest::parse(read_file(p)));
    } catch (const ParseError& e) {
      throw ParseError(p + ": " + e.what());
    }
  }
  return all;
}

}  // namespace segkit::cli
