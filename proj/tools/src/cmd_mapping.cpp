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

// validate-mapping and remap.

#include <algorithm>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "segkit/errors.hpp"
#include "segkit/image_io.hpp"

namespace segkit::cli {
namespace fs = std::filesystem;

namespace {

struct ValidateOptions {
  std::vector<std::string> files;
  std::string overlay;
};

int RunValidate(const ValidateOptions& o, Context& ctx) {
  const Catalog catalog = ctx.catalog();
  const LabelSpace unified = ctx.unified_space();

  std::vector<fs::path> files(o.files.begin(), o.files.end());
  if (files.empty()) {
    if (ctx.global.mapping_dir.empty()) {
      throw ArgumentError("no mapping files given and no --mapping-dir set");
    }
    for (const auto& d : catalog) files.push_back(ctx.mapping_path(d));
  }
  if (!o.overlay.empty() && files.size() != 1) {
    throw ArgumentError("--overlay applies to exactly one mapping file");
  }

  bool mismatch = false;
  for (const auto& file : files) {
    const LoadedMapping m = load_mapping(file, unified, o.overlay);
    const DatasetDescriptor* desc = find_dataset(catalog, m.dataset);
    const std::string name = desc ? desc->name : m.dataset;
    const std::size_t original = m.source.size();
    const std::size_t projected = projected_class_count(m.table);
    std::cout << name << ": " << original << " -> " << projected << '\n';

    const MappingReport report = validate_mapping(m.table, m.source, m.target);
    if (!report.unmapped_sources.empty()) {
      warn(name + ": " + std::to_string(report.unmapped_sources.size()) +
           " source classes have no mapping row and project to void");
    }
    if (desc && (desc->original_classes != original || desc->projected_classes != projected)) {
      mismatch = true;
      warn(name + ": expected " + std::to_string(desc->original_classes) + " -> " +
           std::to_string(desc->projected_classes));
    }
  }
  return mismatch && ctx.global.strict ? kExitVerification : kExitOk;
}

struct RemapOptions {
  std::string in_dir;
  std::string out_dir;
  std::string mapping;
  std::string direction = "to-unified";
  std::string policy = "first-listed";
  std::string overlay;
};

std::vector<fs::path> ListPngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int RunRemap(const RemapOptions& o, Context& ctx) {
  const LabelSpace unified = ctx.unified_space();
  const LoadedMapping m = load_mapping(o.mapping, unified, o.overlay);
  const bool to_unified = o.direction == "to-unified";

  const auto policy = parse_inversion_policy(o.policy);
  if (!policy) throw ArgumentError("unknown inversion policy '" + o.policy + "'");
  const ProjectionLUT lut = build_lut(to_unified ? m.table : invert_mapping(m.table, *policy));
  const LabelSpace& from = to_unified ? m.source : m.target;
  const LabelSpace& to = to_unified ? m.target : m.source;

  const fs::path in_dir(o.in_dir);
  const fs::path out_dir = ctx.output(o.out_dir);
  if (fs::exists(out_dir) && fs::equivalent(in_dir, out_dir)) {
    throw ArgumentError("output directory must differ from the input directory");
  }
  const auto files = ListPngs(in_dir);
  parallel_for(files.size(), ctx.global.threads, [&](std::size_t i) {
    const fs::path src = in_dir / files[i];
    try {
      MaskImage mask = read_mask_png(src, from.name());
      validate_mask(mask, from);
      write_mask_png(out_dir / files[i], project_mask(mask, lut, to));
    } catch (const DataError& e) {
      throw DataError("'" + src.string() + "': " + e.what());
    }
  });
  std::cout << files.size() << " files\n";
  return kExitOk;
}

}  // namespace

Subcommand add_validate_mapping(CLI::App& root) {
  auto o = std::make_shared<ValidateOptions>();
  auto* app = root.add_subcommand(
      "validate-mapping",
      "check mapping CSVs and print original -> projected class counts per dataset");
  app->add_option("files", o->files,
                  "mapping CSVs named <dataset>.csv (default: every catalog dataset under "
                  "--mapping-dir)");
  app->add_option("--overlay", o->overlay, "correction overlay CSV applied before counting");
  return {app, [o](Context& ctx) { return RunValidate(*o, ctx); }};
}

Subcommand add_remap(CLI::App& root) {
  auto o = std::make_shared<RemapOptions>();
  auto* app = root.add_subcommand(
      "remap", "project every PNG mask under a directory through a mapping");
  app->add_option("--in", o->in_dir, "input mask directory (searched recursively)")->required();
  app->add_option("--out", o->out_dir, "output directory; relative paths are preserved")
      ->required();
  app->add_option("--mapping", o->mapping, "dataset mapping CSV")->required();
  app->add_option("--direction", o->direction, "to-unified or to-dataset")
      ->check(CLI::IsMember({"to-unified", "to-dataset"}));
  app->add_option("--policy", o->policy,
                  "collision policy for to-dataset: strict, first-listed or to-void")
      ->check(CLI::IsMember({"strict", "first-listed", "to-void"}));
  app->add_option("--overlay", o->overlay, "correction overlay CSV");
  return {app, [o](Context& ctx) { return RunRemap(*o, ctx); }};
}

}  // namespace segkit::cli
