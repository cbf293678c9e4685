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

// manifest, plan, augment and stats.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "segkit/augmentation.hpp"
#include "segkit/errors.hpp"
#include "segkit/file_util.hpp"
#include "segkit/image_io.hpp"
#include "segkit/sampler.hpp"

namespace segkit::cli {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- manifest

struct ManifestOptions {
  std::string dataset;
  std::string root;
  std::string out;
};

int RunManifest(const ManifestOptions& o, Context& ctx) {
  const Catalog catalog = ctx.catalog();
  const DatasetDescriptor* desc = find_dataset(catalog, o.dataset);
  if (!desc) throw ArgumentError("dataset '" + o.dataset + "' is not in the catalog");

  ManifestBuild built = build_manifest(*desc, o.root);
  for (const auto& w : built.warnings) warn(desc->name + ": " + w);
  emit(o.out.empty() ? "" : ctx.output(o.out).string(), built.manifest.serialize());

  const ManifestVerification v = verify_manifest(built.manifest, *desc);
  for (const auto& s : v.splits) {
    std::cerr << desc->name << ' ' << to_string(s.split) << ": " << s.actual << " of "
              << s.expected << " expected\n";
  }
  for (const auto& m : v.mismatches) warn(m);
  std::cerr << "checksum " << built.manifest.checksum() << '\n';
  return !v.ok && ctx.global.strict ? kExitVerification : kExitOk;
}

// -------------------------------------------------------------------- plan

struct PlanOptions {
  std::vector<std::string> manifests;
  std::uint64_t target = kDefaultRepeatTarget;
  std::uint64_t iters = kDefaultTotalIters;
  std::uint32_t batch = kDefaultBatchSize;
  std::vector<std::string> held_back = {"BDD", "IDD"};
  std::string out;
  std::uint64_t dump_batches = 0;
  std::string batches_out;
  std::string from_plan;
};

std::vector<DatasetPool> PlanPools(const PlanOptions& o, const Catalog& catalog) {
  if (o.manifests.empty()) return pools_from_catalog(catalog);
  const Manifest manifest = load_manifests(o.manifests);
  // Catalog datasets first, in catalog order, then any others by name.
  std::vector<std::string> names;
  for (const auto& d : catalog) {
    auto it = manifest.counts().find(d.name);
    if (it != manifest.counts().end() && it->second.train > 0) names.push_back(d.name);
  }
  for (const auto& [name, counts] : manifest.counts()) {
    if (counts.train > 0 && !find_dataset(catalog, name)) names.push_back(name);
  }
  if (names.empty()) throw DataError("manifests contain no training records");
  return pools_from_manifest(manifest, names);
}

int RunPlan(const PlanOptions& o, Context& ctx) {
  auto make = [&]() -> TrainSchedule {
    if (!o.from_plan.empty()) return TrainSchedule::from_plan_json(read_file(o.from_plan));
    auto pools = PlanPools(o, ctx.catalog());
    std::vector<std::string> names;
    for (const auto& p : pools) names.push_back(p.name);
    RepeatPlan plan = build_repeat_plan(pools, o.target);
    auto phases = default_phases(names, o.iters, o.held_back);
    return build_schedule(std::move(pools), std::move(plan), std::move(phases), o.iters, o.batch,
                          ctx.global.seed);
  };
  const TrainSchedule schedule = make();

  if (!o.out.empty()) {
    emit(ctx.output(o.out).string(), schedule.plan_json());
  } else if (o.dump_batches == 0) {
    emit("", schedule.plan_json());
  }
  if (o.dump_batches > 0) {
    const std::uint64_t n = std::min(o.dump_batches, schedule.total_iters());
    std::string lines;
    for (std::uint64_t i = 0; i < n; ++i) {
      lines += schedule.batch_json(schedule.next_batch(i));
      lines += '\n';
    }
    emit(o.batches_out.empty() ? "" : ctx.output(o.batches_out).string(), lines);
  }
  for (const auto& p : schedule.repeat_plan().factors) {
    std::cerr << p.first << " x" << p.second << '\n';
  }
  return kExitOk;
}

// ----------------------------------------------------------------- augment

struct AugmentOptions {
  std::vector<std::string> manifests;
  std::string dataset;
  std::string split = "train";
  std::uint64_t n = 1;
  std::string out;
  std::string log;
  std::string replay;
  bool to_unified = false;
  std::vector<int> crop = {1024, 1024};
  std::vector<int> base_scale = {2048, 1024};
  std::vector<double> ratio_range = {0.5, 2.0};
  double flip_prob = 0.5;
  int mask_pad = static_cast<int>(kUnifiedVoid);
};

// Projects dataset masks into the unified space when requested.
class MaskLoader {
 public:
  MaskLoader(const Context& ctx, bool to_unified) : to_unified_(to_unified) {
    if (!to_unified) return;
    catalog_ = ctx.catalog();
    unified_ = std::make_unique<LabelSpace>(ctx.unified_space());
    ctx_ = &ctx;
  }

  // Must be called for every dataset before load() is used concurrently.
  void prepare(const std::string& dataset) {
    if (!to_unified_ || luts_.count(dataset)) return;
    const DatasetDescriptor* desc = find_dataset(catalog_, dataset);
    if (!desc) throw ArgumentError("dataset '" + dataset + "' is not in the catalog");
    LoadedMapping m = load_mapping(ctx_->mapping_path(*desc), *unified_);
    luts_.emplace(dataset, Entry{m.source, build_lut(m.table)});
  }

  MaskImage load(const std::string& dataset, const std::string& path) const {
    if (!to_unified_) return read_mask_png(path);
    const Entry& e = luts_.at(dataset);
    try {
      MaskImage mask = read_mask_png(path, e.source.name());
      validate_mask(mask, e.source);
      return project_mask(mask, e.lut, *unified_);
    } catch (const DataError& err) {
      throw DataError("'" + path + "': " + err.what());
    }
  }

 private:
  struct Entry {
    LabelSpace source;
    ProjectionLUT lut;
  };
  bool to_unified_;
  const Context* ctx_ = nullptr;
  Catalog catalog_;
  std::unique_ptr<LabelSpace> unified_;
  std::map<std::string, Entry> luts_;
};

std::string SampleName(std::uint64_t index, const char* kind) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%06llu_%s.png", static_cast<unsigned long long>(index), kind);
  return buf;
}

struct LogEntry {
  std::uint64_t index = 0;
  std::string dataset;
  std::string image;
  std::string mask;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  AugConfig cfg;
  bool to_unified = false;
  AugDraws draws;
};

std::string FormatLogEntry(const LogEntry& e) {
  ojson j;
  j["index"] = e.index;
  j["dataset"] = e.dataset;
  j["image"] = e.image;
  j["mask"] = e.mask;
  j["seed"] = e.seed;
  j["stream"] = e.stream;
  j["crop"] = {e.cfg.crop_width, e.cfg.crop_height};
  j["base_scale"] = {e.cfg.base_width, e.cfg.base_height};
  j["mask_pad"] = e.cfg.mask_pad;
  j["to_unified"] = e.to_unified;
  j["draws"] = ojson::parse(draws_to_json(e.draws));
  return j.dump();
}

LogEntry ParseLogEntry(const std::string& line, std::size_t line_no) {
  try {
    const auto j = nlohmann::json::parse(line);
    LogEntry e;
    e.index = j.at("index").get<std::uint64_t>();
    e.dataset = j.at("dataset").get<std::string>();
    e.image = j.at("image").get<std::string>();
    e.mask = j.at("mask").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.stream = j.at("stream").get<std::uint64_t>();
    e.cfg.crop_width = j.at("crop").at(0).get<int>();
    e.cfg.crop_height = j.at("crop").at(1).get<int>();
    e.cfg.base_width = j.at("base_scale").at(0).get<int>();
    e.cfg.base_height = j.at("base_scale").at(1).get<int>();
    e.cfg.mask_pad = j.at("mask_pad").get<std::uint8_t>();
    e.to_unified = j.at("to_unified").get<bool>();
    e.draws = draws_from_json(j.at("draws").dump());
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(err.what(), line_no);
  }
}

int RunReplay(const AugmentOptions& o, Context& ctx) {
  const std::string text = read_file(o.replay);
  std::vector<LogEntry> entries;
  std::istringstream in(text);
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      entries.push_back(ParseLogEntry(line, no));
    } catch (const ParseError& e) {
      throw ParseError(o.replay + ": " + e.what());
    }
  }
  const bool to_unified = !entries.empty() && entries.front().to_unified;
  MaskLoader loader(ctx, to_unified);
  for (const auto& e : entries) {
    if (e.to_unified != to_unified) throw ParseError(o.replay + ": mixed to_unified entries");
    loader.prepare(e.dataset);
  }
  const fs::path out_dir = ctx.output(o.out);
  parallel_for(entries.size(), ctx.global.threads, [&](std::size_t i) {
    const LogEntry& e = entries[i];
    const ImageBuffer image = read_image(e.image);
    const MaskImage mask = loader.load(e.dataset, e.mask);
    const AugPair pair = apply_augmentation(image, mask, e.cfg, e.draws);
    write_image_png(out_dir / SampleName(e.index, "image"), pair.image);
    write_mask_png(out_dir / SampleName(e.index, "mask"), pair.mask);
  });
  if (!o.log.empty()) {
    std::string lines;
    for (const auto& e : entries) lines += FormatLogEntry(e) + "\n";
    write_file_atomic(ctx.output(o.log), lines);
  }
  std::cout << entries.size() << " samples\n";
  return kExitOk;
}

int RunAugment(const AugmentOptions& o, Context& ctx) {
  if (!o.replay.empty()) return RunReplay(o, ctx);
  if (o.manifests.empty()) throw ArgumentError("--manifest is required unless --replay is given");

  const auto split = parse_split(o.split);
  if (!split) throw ArgumentError("unknown split '" + o.split + "'");
  const Manifest manifest = load_manifests(o.manifests);
  std::vector<const SampleRecord*> records;
  for (const auto& r : manifest.records()) {
    if (r.split == *split && (o.dataset.empty() || r.dataset == o.dataset)) records.push_back(&r);
  }
  if (records.empty() && o.n > 0) throw DataError("no matching records in the manifest");

  AugConfig cfg;
  cfg.crop_width = o.crop[0];
  cfg.crop_height = o.crop[1];
  cfg.base_width = o.base_scale[0];
  cfg.base_height = o.base_scale[1];
  cfg.ratio_min = o.ratio_range[0];
  cfg.ratio_max = o.ratio_range[1];
  cfg.flip_prob = o.flip_prob;
  if (o.mask_pad < 0 || o.mask_pad > 255) throw ArgumentError("--mask-pad must be in [0, 255]");
  cfg.mask_pad = static_cast<std::uint8_t>(o.mask_pad);
  cfg.validate();

  MaskLoader loader(ctx, o.to_unified);
  for (const auto* r : records) loader.prepare(r->dataset);

  const fs::path out_dir = ctx.output(o.out);
  std::vector<LogEntry> entries(o.n);
  parallel_for(o.n, ctx.global.threads, [&](std::size_t k) {
    const SampleRecord& r = *records[k % records.size()];
    const ImageBuffer image = read_image(r.image_path);
    const MaskImage mask = loader.load(r.dataset, r.mask_path);
    RngStream rng(ctx.global.seed, k);
    AugResult res = train_pipeline(image, mask, cfg, rng);
    write_image_png(out_dir / SampleName(k, "image"), res.image);
    write_mask_png(out_dir / SampleName(k, "mask"), res.mask);
    entries[k] = LogEntry{k, r.dataset, r.image_path, r.mask_path, ctx.global.seed, k, cfg,
                          o.to_unified, res.draws};
  });

  std::string lines;
  for (const auto& e : entries) lines += FormatLogEntry(e) + "\n";
  write_file_atomic(o.log.empty() ? out_dir / "draws.jsonl" : ctx.output(o.log), lines);
  std::cout << o.n << " samples\n";
  return kExitOk;
}

// ------------------------------------------------------------------- stats

struct StatsOptions {
  std::vector<std::string> manifests;
  std::string dataset;
  std::string split;
  std::string mapping;
  std::string space;
  bool unified = false;
  std::string out;
};

int RunStats(const StatsOptions& o, Context& ctx) {
  const int sources = !o.mapping.empty() + !o.space.empty() + (o.unified ? 1 : 0);
  if (sources > 1) throw ArgumentError("give at most one of --mapping, --space, --unified");

  std::optional<Split> split;
  if (!o.split.empty()) {
    split = parse_split(o.split);
    if (!split) throw ArgumentError("unknown split '" + o.split + "'");
  }
  const Manifest all = load_manifests(o.manifests);
  std::vector<SampleRecord> kept;
  std::string dataset = o.dataset;
  for (const auto& r : all.records()) {
    if ((dataset.empty() || r.dataset == dataset) && (!split || r.split == *split)) {
      kept.push_back(r);
    }
  }
  const Manifest manifest(std::move(kept));
  if (dataset.empty() && manifest.counts().size() == 1) dataset = manifest.counts().begin()->first;

  auto space = [&]() -> LabelSpace {
    if (o.unified) return ctx.unified_space();
    if (!o.space.empty()) return parse_label_space(read_file(o.space), fs::path(o.space).stem().string());
    if (!o.mapping.empty()) return infer_source_space(read_file(o.mapping), fs::path(o.mapping).stem().string());
    const Catalog catalog = ctx.catalog();
    const DatasetDescriptor* desc = find_dataset(catalog, dataset);
    if (!desc || ctx.global.mapping_dir.empty()) {
      throw ArgumentError("label space unknown: give --mapping, --space or --unified");
    }
    const auto path = ctx.mapping_path(*desc);
    return infer_source_space(read_file(path), path.stem().string());
  }();

  const ClassHistogram hist = class_histogram(manifest, space);
  std::uint64_t total = 0;
  ojson classes = ojson::object();
  for (const auto& c : space.classes()) {
    if (space.void_id() && c.id == *space.void_id()) continue;
    classes[c.name] = hist[c.id];
    total += hist[c.id];
  }
  ojson j;
  j["dataset"] = dataset;
  j["space"] = space.name();
  j["images"] = manifest.size();
  j["pixels"] = total;
  j["classes"] = std::move(classes);
  emit(o.out.empty() ? "" : ctx.output(o.out).string(), j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

Subcommand add_manifest(CLI::App& root) {
  auto o = std::make_shared<ManifestOptions>();
  auto* app = root.add_subcommand(
      "manifest", "scan a dataset directory into a line-delimited JSON manifest");
  app->add_option("--dataset", o->dataset, "catalog dataset name")->required();
  app->add_option("--root", o->root, "dataset root directory")->required();
  app->add_option("--out", o->out, "manifest file (default: stdout)");
  return {app, [o](Context& ctx) { return RunManifest(*o, ctx); }};
}

Subcommand add_plan(CLI::App& root) {
  auto o = std::make_shared<PlanOptions>();
  auto* app = root.add_subcommand("plan", "build the balanced two-phase training schedule");
  app->add_option("--manifest", o->manifests,
                  "take training-set sizes from manifests instead of the catalog");
  app->add_option("--target", o->target, "repeat-factor target size")->check(CLI::PositiveNumber);
  app->add_option("--iters", o->iters, "total iterations")->check(CLI::PositiveNumber);
  app->add_option("--batch", o->batch, "batch size")->check(CLI::PositiveNumber);
  app->add_option("--held-back", o->held_back, "datasets left out of the first phase");
  app->add_option("--out", o->out,
                  "plan file (default: stdout, unless batches are dumped there)");
  app->add_option("--dump-batches", o->dump_batches,
                  "write the first N batches as line-delimited JSON");
  app->add_option("--batches-out", o->batches_out, "file for --dump-batches (default: stdout)");
  app->add_option("--from-plan", o->from_plan, "rebuild the schedule from a plan file");
  return {app, [o](Context& ctx) { return RunPlan(*o, ctx); }};
}

Subcommand add_augment(CLI::App& root) {
  auto o = std::make_shared<AugmentOptions>();
  auto* app = root.add_subcommand(
      "augment",
      "write augmented (image, mask) PNG pairs and a log of every random draw; sample k uses "
      "record k mod N and RNG stream k");
  app->add_option("--manifest", o->manifests, "input manifests");
  app->add_option("--dataset", o->dataset, "only records of this dataset");
  app->add_option("--split", o->split, "train or val")->check(CLI::IsMember({"train", "val"}));
  app->add_option("--n", o->n, "number of samples");
  app->add_option("--out", o->out, "output directory")->required();
  app->add_option("--log", o->log, "draw log (default: <out>/draws.jsonl)");
  app->add_option("--replay", o->replay, "re-apply the draws of a log instead of drawing");
  app->add_flag("--to-unified", o->to_unified,
                "project masks to the unified space first (mappings from --mapping-dir)");
  app->add_option("--crop", o->crop, "crop width and height")->expected(2);
  app->add_option("--base-scale", o->base_scale, "resize box at ratio 1")->expected(2);
  app->add_option("--ratio-range", o->ratio_range, "resize ratio range")->expected(2);
  app->add_option("--flip-prob", o->flip_prob, "horizontal flip probability")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--mask-pad", o->mask_pad, "mask value for padded pixels");
  return {app, [o](Context& ctx) { return RunAugment(*o, ctx); }};
}

Subcommand add_stats(CLI::App& root) {
  auto o = std::make_shared<StatsOptions>();
  auto* app = root.add_subcommand("stats", "per-class pixel counts over a manifest's masks");
  app->add_option("--manifest", o->manifests, "input manifests")->required();
  app->add_option("--dataset", o->dataset, "only records of this dataset");
  app->add_option("--split", o->split, "only this split")->check(CLI::IsMember({"train", "val"}));
  app->add_option("--mapping", o->mapping, "take the label space from a mapping's source side");
  app->add_option("--space", o->space, "label space CSV");
  app->add_flag("--unified", o->unified, "masks are in the unified space");
  app->add_option("--out", o->out, "report file (default: stdout)");
  return {app, [o](Context& ctx) { return RunStats(*o, ctx); }};
}

}  // namespace segkit::cli
