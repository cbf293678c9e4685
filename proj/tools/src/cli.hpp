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

// Shared plumbing of the segkit subcommands.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segkit/dataset_catalog.hpp"
#include "segkit/label_space.hpp"

namespace CLI {
class App;
}

namespace segkit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerification = 1,  // only with --strict
  kExitParse = 2,
  kExitData = 3,
  kExitPredictor = 4,
};

/// Options shared by every subcommand. Flags win over --config values, which
/// win over these defaults.
struct GlobalConfig {
  std::string catalog_path;   // empty = builtin catalog
  std::string mapping_dir;    // where "<dataset>.csv" mappings live
  std::string unified_path;   // unified space CSV; empty = generic space
  std::uint64_t seed = 0;
  bool strict = false;
  unsigned threads = 1;
  std::string output_dir;
};

struct Context {
  GlobalConfig global;
  Catalog catalog() const;
  LabelSpace unified_space() const;
  /// Mapping file of `dataset` under mapping_dir.
  std::filesystem::path mapping_path(const DatasetDescriptor& desc) const;
  /// Joins a relative output path onto output_dir.
  std::filesystem::path output(const std::string& path) const;
};

struct Subcommand {
  CLI::App* app = nullptr;
  std::function<int(Context&)> run;
};

Subcommand add_validate_mapping(CLI::App& root);
Subcommand add_remap(CLI::App& root);
Subcommand add_manifest(CLI::App& root);
Subcommand add_plan(CLI::App& root);
Subcommand add_augment(CLI::App& root);
Subcommand add_tta(CLI::App& root);
Subcommand add_evaluate(CLI::App& root);
Subcommand add_stats(CLI::App& root);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception, by index, is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Mapping CSV plus the two spaces it relates. The source space is inferred
/// from the file's source columns.
struct LoadedMapping {
  std::string dataset;
  LabelSpace source;
  LabelSpace target;
  MappingTable table;
};

LoadedMapping load_mapping(const std::filesystem::path& path, const LabelSpace& unified,
                           const std::string& overlay_path = {});

/// Writes to `path`, or to stdout when `path` is empty or "-".
void emit(const std::string& path, const std::string& text);

/// Diagnostics go to stderr.
void warn(const std::string& message);

Manifest load_manifests(const std::vector<std::string>& paths);

}  // namespace segkit::cli
