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

// Test-time augmentation: predict at several scales with and without a
// horizontal flip, realign every logit map to the original image, fuse and
// take the per-pixel argmax.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segkit/image_io.hpp"
#include "segkit/label_space.hpp"
#include "segkit/logits.hpp"
#include "segkit/predictor.hpp"

namespace segkit {

enum class FusionRule {
  kLogitMean,           // mean of raw logits (default)
  kProbMean,            // rescale logits, softmax, mean of probabilities
  kProbMeanPreRescale,  // softmax at predictor resolution, rescale, mean
};

struct TtaConfig {
  int base_width = 2048;
  int base_height = 1024;
  std::vector<double> ratios = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  bool flip = true;
  FusionRule fusion = FusionRule::kLogitMean;

  void validate() const;
  std::size_t predictor_calls() const { return ratios.size() * (flip ? 2 : 1); }
};

/// Bilinear, per class plane, half-pixel centres, edges clamped. Output is
/// out = top + ty * (bottom - top) with top/bottom = a + tx * (b - a),
/// evaluated in double.
LogitMap rescale_logits(const LogitMap& logits, int width, int height);

/// Mirrors every class plane left-right.
LogitMap hflip_logits(const LogitMap& logits);

/// Element-wise arithmetic mean. Each element's inputs are summed in sorted
/// order, so the result does not depend on the order of `maps`.
LogitMap aggregate(std::span<const LogitMap> maps);

/// Per-pixel softmax with max subtraction.
LogitMap softmax(const LogitMap& logits);

/// Per-pixel argmax, ties to the lowest class. Needs classes <= 256; a
/// non-finite value is a DataError.
MaskImage argmax_mask(const LogitMap& logits, std::string space = {});

struct TtaResult {
  MaskImage mask;
  std::size_t predictor_calls = 0;
};

/// For every ratio r the image is fit into (floor(base_width * r),
/// floor(base_height * r)) keeping aspect, predicted (and predicted mirrored,
/// then un-mirrored, when cfg.flip), and rescaled to `original`.
TtaResult run_tta(const std::string& image_path, ImageSize original, Predictor& predictor,
                  const TtaConfig& cfg, std::string space = {});
/// Reads the original size from the image header.
TtaResult run_tta(const std::string& image_path, Predictor& predictor, const TtaConfig& cfg,
                  std::string space = {});

}  // namespace segkit
