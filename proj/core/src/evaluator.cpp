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

#include "segkit/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "segkit/errors.hpp"
#include "segkit/image_io.hpp"

namespace segkit {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * (classes + 1), 0) {}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (rows[g].size() != rows.size()) throw ArgumentError("confusion matrix rows must be square");
    for (std::size_t p = 0; p < rows.size(); ++p) cm.at(g, p) = rows[g][p];
  }
  return cm;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto v : counts_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t gt) const {
  std::uint64_t t = 0;
  for (std::size_t p = 0; p <= classes_; ++p) t += at(gt, p);
  return t;
}

std::uint64_t ConfusionMatrix::column_total(std::size_t pred) const {
  std::uint64_t t = 0;
  for (std::size_t g = 0; g < classes_; ++g) t += at(g, pred);
  return t;
}

void accumulate(ConfusionMatrix& cm, const MaskImage& pred, const MaskImage& gt,
                std::optional<ClassId> ignore) {
  if (pred.width != gt.width || pred.height != gt.height || pred.data.size() != gt.data.size()) {
    throw ArgumentError("prediction is " + std::to_string(pred.width) + "x" + std::to_string(pred.height) +
                        " but ground truth is " + std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  if (!pred.space.empty() && !gt.space.empty() && pred.space != gt.space) {
    throw ArgumentError("prediction space '" + pred.space + "' differs from ground-truth space '" + gt.space + "'");
  }
  const std::size_t classes = cm.classes();
  constexpr std::int32_t kSkip = -1;
  constexpr std::int32_t kBad = -2;
  // Value -> row (gt) or column (pred) index.
  std::array<std::int32_t, 256> row{};
  std::array<std::int32_t, 256> col{};
  for (std::size_t v = 0; v < 256; ++v) {
    const bool is_ignore = ignore && *ignore == v;
    row[v] = is_ignore ? kSkip : (v < classes ? static_cast<std::int32_t>(v) : kBad);
    col[v] = is_ignore ? static_cast<std::int32_t>(cm.void_column())
                       : (v < classes ? static_cast<std::int32_t>(v) : kBad);
  }
  const std::size_t stride = classes + 1;
  std::uint64_t* counts = &cm.at(0, 0);
  const std::size_t n = gt.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t r = row[gt.data[i]];
    if (r == kSkip) continue;
    const std::int32_t c = col[pred.data[i]];
    if (r < 0 || c < 0) {
      const auto w = static_cast<std::size_t>(gt.width);
      const bool gt_bad = r < 0;
      throw DataError(std::string(gt_bad ? "ground truth" : "prediction") + " pixel (" + std::to_string(i % w) +
                      ", " + std::to_string(i / w) + ") has value " +
                      std::to_string(gt_bad ? gt.data[i] : pred.data[i]) + " outside " + std::to_string(classes) +
                      " classes");
    }
    ++counts[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c)];
  }
}

ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (a.classes() != b.classes()) {
    throw ArgumentError("cannot merge confusion matrices of " + std::to_string(a.classes()) + " and " +
                        std::to_string(b.classes()) + " classes");
  }
  ConfusionMatrix out = a;
  for (std::size_t g = 0; g < a.classes(); ++g) {
    for (std::size_t p = 0; p <= a.classes(); ++p) out.at(g, p) += b.at(g, p);
  }
  return out;
}

IoUReport iou_report(const ConfusionMatrix& cm) {
  IoUReport report;
  report.per_class_iou.resize(cm.classes());
  double sum = 0.0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t uni = cm.row_total(c) + cm.column_total(c) - tp;
    if (uni == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(uni);
    report.per_class_iou[c] = iou;
    sum += iou;
    ++report.counted_classes;
  }
  if (report.counted_classes == 0) throw EvaluationError("no class has a defined IoU (all unions are zero)");
  report.miou = sum / static_cast<double>(report.counted_classes);
  return report;
}

PredictionLocator predictions_in_dir(std::filesystem::path dir) {
  return [dir = std::move(dir)](const SampleRecord& r) {
    return dir / (std::filesystem::path(r.image_path).stem().string() + ".png");
  };
}

DatasetEvaluation evaluate_dataset(const Manifest& ground_truth, const PredictionLocator& locate,
                                   const EvalConfig& cfg) {
  if (!cfg.space) throw ArgumentError("evaluation needs a label space");
  if (!cfg.unified_mode && !cfg.back_projection) {
    throw ArgumentError(
        "scores are computed in the dataset label space: supply a back-projection mapping "
        "(or request unified mode for diagnostics)");
  }
  if (cfg.unified_mode && cfg.back_projection) {
    throw ArgumentError("unified mode scores unprojected predictions; drop the back-projection mapping");
  }
  const LabelSpace& space = *cfg.space;
  const auto ignore = cfg.ignore_class ? cfg.ignore_class : space.void_id();

  std::vector<const SampleRecord*> records;
  for (const auto& r : ground_truth.records()) {
    if (cfg.dataset.empty() || r.dataset == cfg.dataset) records.push_back(&r);
  }

  DatasetEvaluation result{IoUReport{}, ConfusionMatrix(space.extent()), {}, 0, 0};
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::max<std::size_t>(records.size(), 1))));
  std::vector<ConfusionMatrix> partial(threads, ConfusionMatrix(space.extent()));
  std::vector<std::vector<std::string>> missing(threads);
  std::vector<std::size_t> images(threads, 0);
  std::vector<std::exception_ptr> errors(threads);

  auto work = [&](unsigned t) {
    try {
      // Contiguous chunks: thread t owns records [t*n/T, (t+1)*n/T).
      const std::size_t begin = records.size() * t / threads;
      const std::size_t end = records.size() * (t + 1) / threads;
      for (std::size_t i = begin; i < end; ++i) {
        const SampleRecord& r = *records[i];
        const auto pred_path = locate(r);
        if (!std::filesystem::is_regular_file(pred_path)) {
          missing[t].push_back(r.mask_path);
          continue;
        }
        MaskImage gt = read_mask_png(r.mask_path, space.name());
        MaskImage pred = read_mask_png(pred_path, cfg.unified_mode ? space.name() : cfg.back_projection->source);
        if (cfg.back_projection) {
          try {
            pred = project_mask(pred, *cfg.back_projection, space);
          } catch (const DataError& e) {
            throw DataError("'" + pred_path.string() + "': " + e.what());
          }
        }
        try {
          accumulate(partial[t], pred, gt, ignore);
        } catch (const Error& e) {
          throw DataError("'" + r.mask_path + "' vs '" + pred_path.string() + "': " + e.what());
        }
        ++images[t];
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (unsigned t = 0; t < threads; ++t) {
    result.matrix = merge(result.matrix, partial[t]);
    result.missing.insert(result.missing.end(), missing[t].begin(), missing[t].end());
    result.images += images[t];
  }
  if (cfg.strict && !result.missing.empty()) {
    throw EvaluationError(std::to_string(result.missing.size()) + " ground-truth masks have no prediction, first: " +
                          result.missing.front());
  }
  result.pixel_total = result.matrix.total();
  result.report = iou_report(result.matrix);
  return result;
}

std::string report_json(const std::string& dataset, const DatasetEvaluation& eval, const LabelSpace& space,
                        std::optional<ClassId> ignore) {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  std::size_t classes = 0;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& c : space.classes()) {
    if (ignore && c.id == *ignore) continue;
    ++classes;
    const auto& iou = c.id < eval.report.per_class_iou.size() ? eval.report.per_class_iou[c.id] : std::nullopt;
    per_class[c.name] = iou ? nlohmann::ordered_json(*iou) : nlohmann::ordered_json(nullptr);
  }
  j["classes"] = classes;
  j["per_class_iou"] = per_class;
  j["miou"] = eval.report.miou;
  j["pixel_total"] = eval.pixel_total;
  j["counted_classes"] = eval.report.counted_classes;
  j["images"] = eval.images;
  j["missing_predictions"] = eval.missing.size();
  return j.dump(2) + "\n";
}

double masked_cross_entropy(const LogitMap& logits, const MaskImage& gt, std::optional<ClassId> ignore) {
  if (logits.width != gt.width || logits.height != gt.height) {
    throw ArgumentError("logits and ground truth differ in size");
  }
  if (logits.data.size() != logits.plane_size() * static_cast<std::size_t>(logits.classes)) {
    throw ArgumentError("malformed logit map");
  }
  const std::size_t plane = logits.plane_size();
  double total = 0.0;
  std::uint64_t counted = 0;
  for (std::size_t p = 0; p < plane; ++p) {
    const ClassId label = gt.data[p];
    if (ignore && label == *ignore) continue;
    if (label >= static_cast<ClassId>(logits.classes)) {
      throw DataError("ground-truth class " + std::to_string(label) + " at pixel " + std::to_string(p) +
                      " is outside " + std::to_string(logits.classes) + " logit classes");
    }
    double max = -INFINITY;
    for (int c = 0; c < logits.classes; ++c) max = std::max(max, static_cast<double>(logits.plane(c)[p]));
    double sum = 0.0;
    for (int c = 0; c < logits.classes; ++c) sum += std::exp(static_cast<double>(logits.plane(c)[p]) - max);
    total += -(static_cast<double>(logits.plane(static_cast<int>(label))[p]) - max - std::log(sum));
    ++counted;
  }
  if (counted == 0) throw EvaluationError("cross-entropy is undefined: every pixel is ignored");
  return total / static_cast<double>(counted);
}

}  // namespace segkit
