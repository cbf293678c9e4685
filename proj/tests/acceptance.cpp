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

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "segkit/augmentation.hpp"
#include "segkit/dataset_catalog.hpp"
#include "segkit/errors.hpp"
#include "segkit/evaluator.hpp"
#include "segkit/file_util.hpp"
#include "segkit/image_io.hpp"
#include "segkit/label_space.hpp"
#include "segkit/predictor.hpp"
#include "segkit/rng.hpp"
#include "segkit/sampler.hpp"
#include "segkit/tta.hpp"
#include "test_util.hpp"

namespace segkit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string failures;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += what + "; ";
    }
  }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// ----------------------------------------------------------- mapping counts

void MappingCounts(Outcome& o) {
  const std::map<std::string, std::size_t> expected = {
      {"COCO", 133}, {"ADE20K", 146}, {"Cityscapes", 31}, {"Vistas", 64}, {"BDD", 19},
      {"IDD", 26},   {"WildDash2", 31}, {"ScanNet", 41},  {"VIPER", 32}};
  const auto start = Clock::now();
  const fs::path dir = testing::data_dir();
  const LabelSpace unified = parse_label_space(read_file(dir / "unified.csv"), "unified");
  std::map<std::string, std::size_t> lib;
  for (const auto& d : builtin_catalog()) {
    const std::string text = read_file(dir / d.mapping_file);
    const LabelSpace source = infer_source_space(text, d.name);
    lib[d.name] = projected_class_count(parse_mapping(text, source, unified));
  }
  o.check(lib == expected, "library counts differ from the table");
#ifdef SEGKIT_CLI
  const auto r = testing::run_command(std::string(SEGKIT_CLI) + " --unified-space " + (dir / "unified.csv").string() +
                                      " --mapping-dir " + dir.string() + " validate-mapping 2>/dev/null");
  o.check(r.status == 0, "validate-mapping exited with " + std::to_string(r.status));
  std::map<std::string, std::size_t> cli;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    const auto colon = line.find(':');
    const auto arrow = line.find("-> ");
    if (colon == std::string::npos || arrow == std::string::npos) continue;
    cli[line.substr(0, colon)] = std::stoul(line.substr(arrow + 3));
  }
  o.check(cli == expected, "validate-mapping output differs from the table");
#endif
  const double secs = Seconds(start);
  o.check(secs < 5.0, "took " + std::to_string(secs) + " s");
  o.detail << "9/9 datasets exact, " << secs << " s";
}

// ------------------------------------------------------------- repeat plan

void RepeatPlanCheck(Outcome& o) {
  const std::vector<std::pair<std::string, std::uint64_t>> expected = {
      {"COCO", 1}, {"ADE20K", 5}, {"Cityscapes", 40}, {"Vistas", 6}, {"BDD", 17},
      {"IDD", 17}, {"WildDash2", 35}, {"ScanNet", 6}, {"VIPER", 8}};
  const RepeatPlan plan = build_repeat_plan(builtin_catalog());
  // Independent recomputation from the catalog's train counts.
  for (const auto& d : builtin_catalog()) {
    const std::uint64_t f = std::max<std::uint64_t>(1, 120000 / d.train_count);
    o.check(plan.factor(d.name) == f, d.name + " factor " + std::to_string(plan.factor(d.name)));
  }
  o.check(plan.factors == expected, "plan differs from the expected factors");
  for (const auto& [name, f] : plan.factors) o.detail << name << ":" << f << " ";
}

// ---------------------------------------------------------------- schedule

TrainSchedule MakeSchedule(const std::vector<DatasetPool>& pools, std::uint64_t target, std::uint64_t iters,
                           std::uint32_t batch, std::uint64_t seed) {
  std::vector<std::string> names;
  for (const auto& p : pools) names.push_back(p.name);
  return build_schedule(pools, build_repeat_plan(pools, target), default_phases(names, iters), iters, batch, seed);
}

struct ScheduleTally {
  std::uint64_t held_back_first = 0;
  std::uint64_t held_back_second = 0;
  std::uint64_t items = 0;
  std::string dump;
};

ScheduleTally Tally(const TrainSchedule& s, bool dump) {
  ScheduleTally t;
  std::set<std::uint32_t> held;
  for (std::uint32_t d = 0; d < s.pools().size(); ++d) {
    if (s.pools()[d].name == "BDD" || s.pools()[d].name == "IDD") held.insert(d);
  }
  const std::uint64_t half = s.total_iters() / 2;
  for (std::uint64_t it = 0; it < s.total_iters(); ++it) {
    const BatchSpec b = s.next_batch(it);
    t.items += b.items.size();
    for (const auto& item : b.items) {
      if (held.count(item.dataset)) ++(it < half ? t.held_back_first : t.held_back_second);
    }
    if (dump) t.dump += s.batch_json(b) + "\n";
  }
  return t;
}

void Schedule(Outcome& o) {
  const std::vector<DatasetPool> mini = {{"COCO", 1183}, {"ADE20K", 202}, {"Cityscapes", 30},
                                         {"Vistas", 180}, {"BDD", 70},     {"IDD", 70},
                                         {"WildDash2", 34}, {"ScanNet", 195}, {"VIPER", 134}};
  const auto start = Clock::now();
  const TrainSchedule a = MakeSchedule(mini, 1200, 800, 8, 42);
  const TrainSchedule b = MakeSchedule(mini, 1200, 800, 8, 42);
  const ScheduleTally ta = Tally(a, true);
  const ScheduleTally tb = Tally(b, true);
  const double secs = Seconds(start);
  o.check(ta.held_back_first == 0, std::to_string(ta.held_back_first) + " BDD/IDD items before the midpoint");
  o.check(ta.held_back_second > 0, "no BDD/IDD items after the midpoint");
  o.check(ta.items == 800u * 8u, "drew " + std::to_string(ta.items) + " items");
  o.check(a.plan_json() == b.plan_json() && ta.dump == tb.dump, "same seed gave different plans");
  o.check(secs < 10.0, "down-scaled run took " + std::to_string(secs) + " s");

  // Full-size schedule on the builtin catalog.
  const auto full_start = Clock::now();
  const TrainSchedule full = MakeSchedule(pools_from_catalog(builtin_catalog()), kDefaultRepeatTarget,
                                          kDefaultTotalIters, kDefaultBatchSize, 0);
  const ScheduleTally tf = Tally(full, false);
  const double full_secs = Seconds(full_start);
  o.check(tf.held_back_first == 0, "full schedule has BDD/IDD before iteration 40000");
  o.check(tf.held_back_second > 0, "full schedule has no BDD/IDD after iteration 40000");
  o.check(tf.items == 5120000u, "full schedule drew " + std::to_string(tf.items) + " items");
  o.detail << "down-scaled: 0 BDD/IDD in [0,400), " << ta.held_back_second << " in [400,800), " << ta.items
           << " items, byte-identical, " << secs << " s; full: " << tf.items << " items, "
           << tf.held_back_second << " BDD/IDD in [40000,80000), " << full_secs << " s";
}

// --------------------------------------------------------- projection oracle

void ProjectionOracle(Outcome& o) {
  std::mt19937 gen(2024);
  const LabelSpace unified = generic_unified_space();
  std::size_t masks = 0, round_trips = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(1, 60)(gen);
    const bool with_void = gen() % 2;
    const LabelSpace source = testing::toy_space("s", n, with_void ? std::optional<ClassId>(n - 1) : std::nullopt);
    // Random partial mapping; ids are drawn without replacement when the
    // mapping should be injective.
    const bool injective = trial % 2 == 0;
    std::vector<ClassId> targets(255);
    std::iota(targets.begin(), targets.end(), 1);
    std::shuffle(targets.begin(), targets.end(), gen);
    std::map<ClassId, ClassId> oracle;
    std::vector<std::pair<ClassId, ClassId>> rows;
    for (ClassId id = 0; id < n; ++id) {
      if (with_void && id == n - 1) {
        rows.push_back({id, 0});
        continue;
      }
      if (gen() % 5 == 0 && !injective) continue;
      const ClassId t = injective ? targets[id] : std::uniform_int_distribution<ClassId>(1, 255)(gen);
      rows.push_back({id, t});
      oracle[id] = t;
    }
    const std::string csv = testing::mapping_csv(rows, with_void ? std::optional<ClassId>(n - 1) : std::nullopt);
    const MappingTable table = parse_mapping(csv, source, unified);
    const ProjectionLUT lut = build_lut(table);

    const int w = std::uniform_int_distribution<int>(1, 64)(gen);
    const int h = std::uniform_int_distribution<int>(1, 64)(gen);
    std::vector<std::uint8_t> values(n);
    std::iota(values.begin(), values.end(), 0);
    const MaskImage mask = testing::random_mask(gen, w, h, values, "s");
    const MaskImage out = project_mask(mask, lut, unified);
    bool equal = out.width == w && out.height == h;
    for (std::size_t p = 0; equal && p < mask.data.size(); ++p) {
      const auto it = oracle.find(mask.data[p]);
      const std::uint8_t want = it == oracle.end() ? 0 : static_cast<std::uint8_t>(it->second);
      equal = out.data[p] == want;
    }
    o.check(equal, "mask " + std::to_string(trial) + " differs from the per-pixel oracle");
    ++masks;

    if (injective) {
      const MaskImage back = project_mask(out, build_lut(invert_mapping(table, InversionPolicy::kStrict)), source);
      o.check(back.data == mask.data, "round trip " + std::to_string(trial) + " is not the identity");
      ++round_trips;
    }
  }
  o.detail << masks << " masks match the oracle, " << round_trips << " round trips exact";
}

// -------------------------------------------------------------- evaluator

void EvaluatorOracle(Outcome& o) {
  const IoUReport r = iou_report(ConfusionMatrix::from_rows({{3, 1}, {2, 4}}));
  const double want_miou = (0.5 + 4.0 / 7.0) / 2.0;
  o.check(r.per_class_iou[0] && std::abs(*r.per_class_iou[0] - 0.5) <= 1e-12, "IoU0");
  o.check(r.per_class_iou[1] && std::abs(*r.per_class_iou[1] - 4.0 / 7.0) <= 1e-12, "IoU1");
  o.check(std::abs(r.miou - want_miou) <= 1e-12, "miou");

  std::mt19937 gen(77);
  ConfusionMatrix merged(6), single(6);
  MaskImage all_pred(32, 320, ""), all_gt(32, 320, "");
  for (int i = 0; i < 10; ++i) {
    const MaskImage pred = testing::random_mask(gen, 32, 32, {0, 1, 2, 3, 4, 5, 255});
    const MaskImage gt = testing::random_mask(gen, 32, 32, {0, 1, 2, 3, 4, 5, 255});
    std::copy(pred.data.begin(), pred.data.end(), all_pred.data.begin() + 1024 * i);
    std::copy(gt.data.begin(), gt.data.end(), all_gt.data.begin() + 1024 * i);
    ConfusionMatrix one(6);
    accumulate(one, pred, gt, ClassId{255});
    merged = merge(merged, one);
  }
  accumulate(single, all_pred, all_gt, ClassId{255});
  o.check(merged == single, "chunk-merged matrix differs from single pass");

  // pred = gt end to end: dataset masks, projected to unified, scored after
  // back-projection through files on disk, with several thread counts.
  testing::TempDir dir;
  fs::create_directories(dir / "gt");
  fs::create_directories(dir / "pred");
  const LabelSpace ds = testing::toy_space("d", 6, ClassId{5});
  const LabelSpace unified = generic_unified_space();
  const MappingTable table =
      parse_mapping(testing::mapping_csv({{0, 10}, {1, 11}, {2, 12}, {3, 13}, {4, 14}, {5, 0}}, ClassId{5}), ds, unified);
  const ProjectionLUT to_unified = build_lut(table);
  std::vector<SampleRecord> records;
  for (int i = 0; i < 8; ++i) {
    const MaskImage gt = testing::random_mask(gen, 40, 24, {0, 1, 2, 3, 4, 5}, "d");
    const std::string name = "im" + std::to_string(i);
    write_mask_png(dir / "gt" / (name + ".png"), gt);
    write_mask_png(dir / "pred" / (name + ".png"), project_mask(gt, to_unified, unified));
    records.push_back({"D", Split::kVal, (dir / (name + ".jpg")).string(), (dir / "gt" / (name + ".png")).string(), 40, 24});
  }
  const Manifest manifest(std::move(records));
  for (unsigned threads : {1u, 3u}) {
    EvalConfig cfg;
    cfg.space = ds;
    cfg.back_projection = build_lut(invert_mapping(table));
    cfg.threads = threads;
    cfg.strict = true;
    const auto eval = evaluate_dataset(manifest, predictions_in_dir(dir / "pred"), cfg);
    o.check(eval.report.miou == 1.0, "pred = gt gave miou " + std::to_string(eval.report.miou));
  }
  o.detail.precision(17);
  o.detail << "IoU (" << *r.per_class_iou[0] << ", " << *r.per_class_iou[1] << "), miou " << r.miou
           << "; merge exact; pred = gt miou 1";
}

// ------------------------------------------------------------ cross-entropy

void CrossEntropy(Outcome& o) {
  double worst_uniform = 0.0;
  for (int c : {2, 3, 7, 19, 150, 256}) {
    const LogitMap l(4, 3, c, -1.25f);
    MaskImage gt(4, 3, "");
    for (std::size_t p = 0; p < gt.data.size(); ++p) gt.data[p] = static_cast<std::uint8_t>((p * 7) % static_cast<std::size_t>(c));
    worst_uniform = std::max(worst_uniform, std::abs(masked_cross_entropy(l, gt, std::nullopt) - std::log(c)));
  }
  o.check(worst_uniform <= 1e-9, "uniform logits off by " + std::to_string(worst_uniform));

  std::mt19937 gen(31);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LogitMap l = testing::random_logits(gen, 2, 2, 3, -10.0f, 10.0f);
    const MaskImage gt = testing::random_mask(gen, 2, 2, {0, 1, 2});
    double total = 0.0;
    for (int p = 0; p < 4; ++p) {
      double z = 0.0;
      for (int c = 0; c < 3; ++c) z += std::exp(static_cast<double>(l.plane(c)[p]));
      total -= std::log(std::exp(static_cast<double>(l.plane(gt.data[p])[p])) / z);
    }
    worst = std::max(worst, std::abs(masked_cross_entropy(l, gt, std::nullopt) - total / 4.0));
  }
  o.check(worst <= 1e-12, "oracle disagreement " + std::to_string(worst));
  o.detail << "max |CE - ln C| = " << worst_uniform << ", max oracle gap on 1000 2x2x3 instances = " << worst;
}

// -------------------------------------------------------------------- TTA

class CountingPredictor : public Predictor {
 public:
  LogitMap predict(const PredictRequest& r) override {
    ++calls;
    return LogitMap(r.width, r.height, 4, 0.0f);
  }
  std::size_t calls = 0;
};

class RandomPredictor : public Predictor {
 public:
  LogitMap predict(const PredictRequest& r) override {
    last = testing::random_logits(gen, r.width, r.height, 9);
    return last;
  }
  std::mt19937 gen{5};
  LogitMap last;
};

void Tta(Outcome& o) {
  const TtaConfig defaults;
  CountingPredictor counter;
  const TtaResult counted = run_tta("a.png", ImageSize{2048, 1024}, counter, defaults);
  o.check(counter.calls == 12 && counted.predictor_calls == 12, std::to_string(counter.calls) + " predictor calls");

  TtaConfig degenerate;
  degenerate.ratios = {1.0};
  degenerate.flip = false;
  RandomPredictor rp;
  bool degenerate_ok = true;
  for (auto size : {ImageSize{2048, 1024}, ImageSize{300, 200}, ImageSize{97, 61}}) {
    degenerate.base_width = size.width;
    degenerate.base_height = size.height;
    const TtaResult res = run_tta("b.png", size, rp, degenerate);
    degenerate_ok = degenerate_ok && res.mask.data == argmax_mask(rp.last).data;
  }
  o.check(degenerate_ok, "degenerate TTA differs from direct argmax");

  std::mt19937 gen(8);
  bool involution = true;
  for (int i = 0; i < 100; ++i) {
    const LogitMap l = testing::random_logits(gen, 1 + i % 23, 1 + i % 7, 1 + i % 5, -1e6f, 1e6f);
    involution = involution && hflip_logits(hflip_logits(l)) == l;
  }
  o.check(involution, "hflip is not an involution");

  // gt-leak: one-hot fixtures of the resized (and mirrored) ground truth.
  testing::TempDir dir;
  fs::create_directories(dir / "fixtures");
  fs::create_directories(dir / "pred");
  const LabelSpace ds = testing::toy_space("d", 4);
  const LabelSpace unified = generic_unified_space();
  const MappingTable table = parse_mapping(testing::mapping_csv({{0, 3}, {1, 5}, {2, 7}, {3, 9}}), ds, unified);
  MaskImage gt(64, 32, "d");
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 64; ++x) gt.at(x, y) = static_cast<std::uint8_t>((y >= 16 ? 2 : 0) + (x >= 32 ? 1 : 0));
  }
  write_mask_png(dir / "gt.png", gt);
  const MaskImage gt_unified = project_mask(gt, build_lut(table), unified);
  TtaConfig cfg;
  cfg.base_width = 64;
  cfg.base_height = 32;
  for (double r : cfg.ratios) {
    const ImageSize fit = fit_keep_aspect(ImageSize{64, 32}, static_cast<int>(64 * r), static_cast<int>(32 * r));
    for (bool flip : {false, true}) {
      MaskImage m = resize_nearest(gt_unified, fit.width, fit.height);
      if (flip) m = hflip_mask(m);
      LogitMap l(fit.width, fit.height, 16, 0.0f);
      for (std::size_t p = 0; p < m.data.size(); ++p) l.plane(m.data[p])[p] = 1.0f;
      write_sglt(dir / "fixtures" / fixture_file_name("quad.png", fit.width, fit.height, flip), l);
    }
  }
  FixturePredictor fixtures(dir / "fixtures");
  const TtaResult leaked = run_tta("quad.png", ImageSize{64, 32}, fixtures, cfg, "unified");
  write_mask_png(dir / "pred" / "quad.png", leaked.mask);
  EvalConfig ecfg;
  ecfg.space = ds;
  ecfg.back_projection = build_lut(invert_mapping(table));
  ecfg.strict = true;
  const Manifest manifest({SampleRecord{"D", Split::kVal, "quad.png", (dir / "gt.png").string(), 64, 32}});
  const auto eval = evaluate_dataset(manifest, predictions_in_dir(dir / "pred"), ecfg);
  o.check(eval.report.miou == 1.0, "gt-leak miou " + std::to_string(eval.report.miou));
  o.detail << counter.calls << " calls; degenerate bit-exact; hflip involution; gt-leak miou " << eval.report.miou
           << " over " << leaked.predictor_calls << " fixture reads";
}

// ------------------------------------------------------------ augmentation

struct AugInput {
  ImageBuffer image;
  MaskImage mask;
  std::set<std::uint8_t> classes;
};

AugInput MakeInput(std::mt19937& gen, int w, int h) {
  AugInput in{testing::random_image(gen, w, h), MaskImage(w, h, ""), {}};
  const std::uint8_t palette[] = {1, 7, 20, 33, 255};
  // Blocky layout so that nearest resampling has regions to keep.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) in.mask.at(x, y) = palette[((x / 37) * 3 + (y / 29)) % 5];
  }
  in.classes.insert(in.mask.data.begin(), in.mask.data.end());
  return in;
}

void Augmentation(Outcome& o) {
  std::mt19937 gen(99);
  std::vector<AugInput> inputs;
  for (auto [w, h] : {std::pair{2048, 1024}, {1280, 720}, {640, 480}, {1920, 1080}}) inputs.push_back(MakeInput(gen, w, h));
  const AugConfig cfg;
  constexpr int kRuns = 10000;
  constexpr int kReplayEvery = 20;
  int flips = 0, wrong_size = 0, bad_classes = 0, replay_mismatch = 0, replays = 0;
  const auto start = Clock::now();
  for (int k = 0; k < kRuns; ++k) {
    const AugInput& in = inputs[static_cast<std::size_t>(k) % inputs.size()];
    RngStream rng(2026, static_cast<std::uint64_t>(k));
    const AugResult res = train_pipeline(in.image, in.mask, cfg, rng);
    flips += res.draws.flip ? 1 : 0;
    if (res.image.width != 1024 || res.image.height != 1024 || res.mask.width != 1024 || res.mask.height != 1024) {
      ++wrong_size;
    }
    std::array<bool, 256> seen{};
    for (std::uint8_t v : res.mask.data) seen[v] = true;
    for (int v = 0; v < 256; ++v) {
      if (seen[v] && v != cfg.mask_pad && !in.classes.count(static_cast<std::uint8_t>(v))) ++bad_classes;
    }
    if (k % kReplayEvery == 0) {
      const AugDraws logged = draws_from_json(draws_to_json(res.draws));
      const AugPair again = apply_augmentation(in.image, in.mask, cfg, logged);
      if (again.image.data != res.image.data || again.mask.data != res.mask.data) ++replay_mismatch;
      ++replays;
    }
  }
  const double secs = Seconds(start);
  o.check(wrong_size == 0, std::to_string(wrong_size) + " outputs not 1024x1024");
  o.check(std::abs(flips - kRuns / 2) <= 150, std::to_string(flips) + " flips");
  o.check(bad_classes == 0, std::to_string(bad_classes) + " unexpected mask classes");
  o.check(replay_mismatch == 0, std::to_string(replay_mismatch) + " replays differ");
  o.detail << kRuns << " runs at 1024x1024, " << flips << " flips, mask classes within input + void, "
           << replays << " sampled replays bit-identical, " << secs << " s";
}

// -------------------------------------------------------------- throughput

void Throughput(Outcome& o) {
  std::mt19937 gen(4);
  const LabelSpace source = testing::toy_space("s", 40, ClassId{0});
  const LabelSpace unified = generic_unified_space();
  std::vector<std::pair<ClassId, ClassId>> rows;
  for (ClassId i = 0; i < 40; ++i) rows.push_back({i, i == 0 ? 0 : 1 + (i * 7) % 200});
  const ProjectionLUT lut = build_lut(parse_mapping(testing::mapping_csv(rows, ClassId{0}), source, unified));
  std::vector<std::uint8_t> values(40);
  std::iota(values.begin(), values.end(), 0);
  std::vector<MaskImage> masks;
  for (int i = 0; i < 4; ++i) masks.push_back(testing::random_mask(gen, 2048, 1024, values, "s"));

  constexpr int kMasks = 200;
  std::uint64_t sink = 0;
  auto start = Clock::now();
  for (int i = 0; i < kMasks; ++i) {
    const MaskImage& m = masks[static_cast<std::size_t>(i) % masks.size()];
    validate_mask(m, source);
    sink += project_mask(m, lut, unified).data[static_cast<std::size_t>(i)];
  }
  const double in_memory = kMasks / Seconds(start);

  // With PNG decode and encode, as the remap command does it. Label maps are
  // piecewise constant; uniform noise would mostly time zlib.
  MaskImage regions(2048, 1024, "s");
  for (int y = 0; y < 1024; ++y) {
    for (int x = 0; x < 2048; ++x) regions.at(x, y) = static_cast<std::uint8_t>(((x / 97) * 5 + (y / 61) * 3 + (x + y) / 300) % 40);
  }
  testing::TempDir dir;
  write_mask_png(dir / "m.png", regions);
  constexpr int kFiles = 20;
  start = Clock::now();
  for (int i = 0; i < kFiles; ++i) {
    const MaskImage m = read_mask_png(dir / "m.png", "s");
    validate_mask(m, source);
    sink += encode_mask_png(project_mask(m, lut, unified)).size();
  }
  const double with_png = kFiles / Seconds(start);
  o.check(in_memory >= 50.0, std::to_string(in_memory) + " masks/s in memory");
  o.detail.precision(4);
  o.detail << in_memory << " masks/s/thread in memory (2048x1024); " << with_png
           << " masks/s including PNG decode+encode of piecewise-constant masks" << (sink == 0 ? " " : "");
}

}  // namespace
}  // namespace segkit

int main() {
  using segkit::Outcome;
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"mapping counts", segkit::MappingCounts},
      {"repeat plan", segkit::RepeatPlanCheck},
      {"schedule", segkit::Schedule},
      {"projection oracle", segkit::ProjectionOracle},
      {"evaluator oracle", segkit::EvaluatorOracle},
      {"cross-entropy", segkit::CrossEntropy},
      {"tta", segkit::Tta},
      {"augmentation", segkit::Augmentation},
      {"throughput", segkit::Throughput},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.failures << o.detail.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
