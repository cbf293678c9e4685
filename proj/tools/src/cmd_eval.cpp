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

// tta and evaluate.

#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "segkit/errors.hpp"
#include "segkit/evaluator.hpp"
#include "segkit/file_util.hpp"
#include "segkit/image_io.hpp"
#include "segkit/tta.hpp"

namespace segkit::cli {
namespace fs = std::filesystem;

namespace {

struct TtaOptions {
  std::vector<std::string> images;
  std::vector<std::string> manifests;
  std::string dataset;
  std::string split = "val";
  std::string predictor;
  std::string fixtures;
  std::vector<double> ratios = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  bool no_flip = false;
  bool prob_mean = false;
  std::string fusion = "logit-mean";
  std::vector<int> base_scale = {2048, 1024};
  std::string out;
};

// Predictors are not thread-safe; each worker borrows one at a time.
class PredictorPool {
 public:
  explicit PredictorPool(std::vector<std::unique_ptr<Predictor>> items)
      : items_(std::move(items)) {
    for (auto& p : items_) free_.push_back(p.get());
  }

  template <typename Fn>
  auto with(Fn&& fn) {
    Predictor* p = nullptr;
    {
      std::lock_guard lock(mu_);
      p = free_.back();
      free_.pop_back();
    }
    struct Return {
      PredictorPool* pool;
      Predictor* p;
      ~Return() {
        std::lock_guard lock(pool->mu_);
        pool->free_.push_back(p);
      }
    } ret{this, p};
    return fn(*p);
  }

  void close() {
    for (auto& p : items_) {
      if (auto* proc = dynamic_cast<ProcessPredictor*>(p.get())) proc->close();
    }
  }

 private:
  std::vector<std::unique_ptr<Predictor>> items_;
  std::vector<Predictor*> free_;
  std::mutex mu_;
};

int RunTta(const TtaOptions& o, Context& ctx) {
  if (o.predictor.empty() == o.fixtures.empty()) {
    throw ArgumentError("give exactly one of --predictor and --fixtures");
  }
  TtaConfig cfg;
  cfg.base_width = o.base_scale[0];
  cfg.base_height = o.base_scale[1];
  cfg.ratios = o.ratios;
  cfg.flip = !o.no_flip;
  if (o.fusion == "logit-mean") {
    cfg.fusion = FusionRule::kLogitMean;
  } else if (o.fusion == "prob-mean") {
    cfg.fusion = FusionRule::kProbMean;
  } else {
    cfg.fusion = FusionRule::kProbMeanPreRescale;
  }
  if (o.prob_mean) cfg.fusion = FusionRule::kProbMean;
  cfg.validate();

  std::vector<std::string> images = o.images;
  if (!o.manifests.empty()) {
    const auto split = parse_split(o.split);
    if (!split) throw ArgumentError("unknown split '" + o.split + "'");
    const Manifest manifest = load_manifests(o.manifests);
    for (const auto& r : manifest.records()) {
      if (r.split == *split && (o.dataset.empty() || r.dataset == o.dataset)) {
        images.push_back(r.image_path);
      }
    }
  }
  std::set<std::string> stems;
  for (const auto& img : images) {
    if (!stems.insert(fs::path(img).stem().string()).second) {
      throw ArgumentError("two inputs share the file stem '" + fs::path(img).stem().string() +
                          "'; outputs would collide");
    }
  }

  const unsigned workers = static_cast<unsigned>(
      std::max<std::size_t>(1, std::min<std::size_t>(ctx.global.threads, images.size())));
  std::vector<std::unique_ptr<Predictor>> predictors;
  for (unsigned i = 0; i < workers; ++i) {
    if (!o.predictor.empty()) {
      predictors.push_back(std::make_unique<ProcessPredictor>(o.predictor));
    } else {
      predictors.push_back(std::make_unique<FixturePredictor>(o.fixtures));
    }
  }
  PredictorPool pool(std::move(predictors));

  const fs::path out_dir = ctx.output(o.out);
  parallel_for(images.size(), workers, [&](std::size_t i) {
    const TtaResult res =
        pool.with([&](Predictor& p) { return run_tta(images[i], p, cfg, "unified"); });
    write_mask_png(out_dir / (fs::path(images[i]).stem().string() + ".png"), res.mask);
  });
  pool.close();

  std::cerr << images.size() << " images, " << images.size() * cfg.predictor_calls()
            << " predictor calls\n";
  std::cout << images.size() << " files\n";
  return kExitOk;
}

struct EvaluateOptions {
  std::string pred;
  std::string gt;
  std::string mapping;
  std::string space;
  std::string dataset;
  bool unified = false;
  std::string policy = "first-listed";
  std::optional<ClassId> ignore;
  std::string out;
};

int RunEvaluate(const EvaluateOptions& o, Context& ctx) {
  const Manifest manifest = load_manifests({o.gt});
  std::string dataset = o.dataset;
  if (dataset.empty()) {
    if (manifest.counts().size() != 1) {
      throw ArgumentError("the manifest holds " + std::to_string(manifest.counts().size()) +
                          " datasets; choose one with --dataset");
    }
    dataset = manifest.counts().begin()->first;
  }

  EvalConfig cfg;
  cfg.dataset = dataset;
  cfg.strict = ctx.global.strict;
  cfg.threads = ctx.global.threads;
  cfg.ignore_class = o.ignore;
  cfg.unified_mode = o.unified;
  const LabelSpace unified = ctx.unified_space();
  if (o.unified) {
    cfg.space = unified;
  } else {
    if (o.mapping.empty()) throw ArgumentError("--mapping is required unless --unified is set");
    const auto policy = parse_inversion_policy(o.policy);
    if (!policy) throw ArgumentError("unknown inversion policy '" + o.policy + "'");
    LoadedMapping m = load_mapping(o.mapping, unified);
    if (!o.space.empty()) {
      m.source = parse_label_space(read_file(o.space), m.dataset);
      m.table = parse_mapping(read_file(o.mapping), m.source, unified);
    }
    cfg.back_projection = build_lut(invert_mapping(m.table, *policy));
    cfg.space = m.source;
  }

  const DatasetEvaluation eval = evaluate_dataset(manifest, predictions_in_dir(o.pred), cfg);
  for (const auto& m : eval.missing) warn("no prediction for " + m);
  const auto ignore = cfg.ignore_class ? cfg.ignore_class : cfg.space->void_id();
  emit(o.out.empty() ? "" : ctx.output(o.out).string(),
       report_json(dataset, eval, *cfg.space, ignore));
  std::cerr << dataset << ": miou " << eval.report.miou << " over " << eval.images
            << " images\n";
  return kExitOk;
}

}  // namespace

Subcommand add_tta(CLI::App& root) {
  auto o = std::make_shared<TtaOptions>();
  auto* app = root.add_subcommand(
      "tta",
      "multi-scale (and mirrored) prediction, fused and written as unified-space PNG masks "
      "named <image stem>.png");
  app->add_option("--image", o->images, "input images");
  app->add_option("--manifest", o->manifests, "take input images from manifests");
  app->add_option("--dataset", o->dataset, "only records of this dataset");
  app->add_option("--split", o->split, "manifest split")->check(CLI::IsMember({"train", "val"}));
  app->add_option("--predictor", o->predictor,
                  "predictor command speaking the line protocol (run via /bin/sh -c)");
  app->add_option("--fixtures", o->fixtures, "directory of pre-generated SGLT logits");
  app->add_option("--ratios", o->ratios, "scale ratios")->check(CLI::PositiveNumber);
  app->add_flag("--no-flip", o->no_flip, "skip the mirrored predictions");
  app->add_flag("--prob-mean", o->prob_mean, "average softmax probabilities (same as --fusion prob-mean)");
  app->add_option("--fusion", o->fusion, "logit-mean, prob-mean or prob-mean-pre-rescale")
      ->check(CLI::IsMember({"logit-mean", "prob-mean", "prob-mean-pre-rescale"}));
  app->add_option("--base-scale", o->base_scale, "resize box at ratio 1")->expected(2);
  app->add_option("--out", o->out, "output directory")->required();
  return {app, [o](Context& ctx) { return RunTta(*o, ctx); }};
}

Subcommand add_evaluate(CLI::App& root) {
  auto o = std::make_shared<EvaluateOptions>();
  auto* app = root.add_subcommand(
      "evaluate",
      "class mIoU of unified predictions, scored in the dataset label space after "
      "back-projection");
  app->add_option("--pred", o->pred, "directory of <image stem>.png predictions")->required();
  app->add_option("--gt", o->gt, "ground-truth manifest")->required();
  app->add_option("--mapping", o->mapping, "dataset mapping CSV");
  app->add_option("--space", o->space, "dataset label space CSV (default: from the mapping)");
  app->add_option("--dataset", o->dataset, "dataset to score (default: the only one)");
  app->add_flag("--unified", o->unified, "diagnostics: score in the unified space");
  app->add_option("--policy", o->policy, "collision policy: strict, first-listed or to-void")
      ->check(CLI::IsMember({"strict", "first-listed", "to-void"}));
  app->add_option("--ignore", o->ignore, "ignored ground-truth id (default: the void class)");
  app->add_option("--out", o->out, "report file (default: stdout)");
  return {app, [o](Context& ctx) { return RunEvaluate(*o, ctx); }};
}

}  // namespace segkit::cli
