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

// Confusion-matrix accumulation and class mIoU, per dataset, after unified
// predictions are projected back to the dataset's own label space.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segkit/dataset_catalog.hpp"
#include "segkit/label_space.hpp"
#include "segkit/logits.hpp"

namespace segkit {

/// counts[gt][pred] over C classes plus one extra column (index C) for
/// predictions equal to the ignore id, so every counted pixel lands in its
/// ground-truth row.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0);
  /// From a square C x C table; the void column starts at zero.
  static ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

  std::size_t classes() const { return classes_; }
  std::size_t void_column() const { return classes_; }

  std::uint64_t at(std::size_t gt, std::size_t pred) const { return counts_[gt * (classes_ + 1) + pred]; }
  std::uint64_t& at(std::size_t gt, std::size_t pred) { return counts_[gt * (classes_ + 1) + pred]; }

  std::uint64_t total() const;
  std::uint64_t row_total(std::size_t gt) const;
  std::uint64_t column_total(std::size_t pred) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

/// Counts every pixel whose ground truth is not `ignore`. Both masks must have
/// the same size (and space, when both name one); values must be < C or equal
/// `ignore`.
void accumulate(ConfusionMatrix& cm, const MaskImage& pred, const MaskImage& gt,
                std::optional<ClassId> ignore);

/// Element-wise sum; ArgumentError when the class counts differ.
ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b);

struct IoUReport {
  std::vector<std::optional<double>> per_class_iou;  // nullopt when union is 0
  double miou = 0.0;
  std::size_t counted_classes = 0;
};

/// IoU_c = tp / (row_c + col_c - tp); zero-union classes are left out of
/// the mean. EvaluationError when no class has a defined IoU.
IoUReport iou_report(const ConfusionMatrix& cm);

struct EvalConfig {
  std::string dataset;  // records of other datasets are skipped; empty = all
  std::optional<LabelSpace> space;  // the space scores are computed in
  std::optional<ClassId> ignore_class;  // defaults to space->void_id()
  // Unified -> dataset table. Required unless unified_mode is set.
  std::optional<ProjectionLUT> back_projection;
  bool unified_mode = false;  // diagnostics: score directly in unified space
  bool strict = false;        // missing predictions are fatal
  unsigned threads = 1;
};

using PredictionLocator = std::function<std::filesystem::path(const SampleRecord&)>;

/// <dir>/<stem of the record's image file>.png
PredictionLocator predictions_in_dir(std::filesystem::path dir);

struct DatasetEvaluation {
  IoUReport report;
  ConfusionMatrix matrix;
  std::vector<std::string> missing;  // ground-truth masks without a prediction
  std::size_t images = 0;
  std::uint64_t pixel_total = 0;
};

/// Back-projects each prediction, accumulates per thread and merges.
DatasetEvaluation evaluate_dataset(const Manifest& ground_truth, const PredictionLocator& locate,
                                   const EvalConfig& cfg);

/// Report file: dataset, classes, per_class_iou{name: iou|null}, miou,
/// pixel_total.
std::string report_json(const std::string& dataset, const DatasetEvaluation& eval, const LabelSpace& space,
                        std::optional<ClassId> ignore);

/// Mean over non-ignored pixels of -log softmax(logits)[gt], computed in
/// double with max subtraction.
double masked_cross_entropy(const LogitMap& logits, const MaskImage& gt, std::optional<ClassId> ignore);

}  // namespace segkit
