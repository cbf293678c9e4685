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

#include "segkit/tta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segkit/augmentation.hpp"
#include "segkit/errors.hpp"

namespace segkit {
namespace {

struct Tap {
  int i0 = 0;
  int i1 = 0;
  double t = 0.0;
};

std::vector<Tap> Taps(int src_size, int dst_size) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst_size));
  const double scale = static_cast<double>(src_size) / static_cast<double>(dst_size);
  for (int i = 0; i < dst_size; ++i) {
    const double f = (i + 0.5) * scale - 0.5;
    const double base = std::floor(f);
    Tap tap{static_cast<int>(base), 0, f - base};
    if (tap.i0 < 0) {
      tap.i0 = 0;
      tap.t = 0.0;
    }
    if (tap.i0 >= src_size - 1) {
      tap.i0 = src_size - 1;
      tap.t = 0.0;
    }
    tap.i1 = std::min(tap.i0 + 1, src_size - 1);
    taps[static_cast<std::size_t>(i)] = tap;
  }
  return taps;
}

void CheckShape(const LogitMap& l) {
  if (l.width <= 0 || l.height <= 0 || l.classes <= 0 ||
      l.data.size() != l.plane_size() * static_cast<std::size_t>(l.classes)) {
    throw ArgumentError("malformed logit map");
  }
}

std::string RatioLabel(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

void TtaConfig::validate() const {
  if (base_width <= 0 || base_height <= 0) throw ArgumentError("TTA base scale must be positive");
  if (ratios.empty()) throw ArgumentError("TTA needs at least one ratio");
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ArgumentError("TTA ratios must be positive");
  }
}

LogitMap rescale_logits(const LogitMap& logits, int width, int height) {
  CheckShape(logits);
  if (width <= 0 || height <= 0) throw ArgumentError("rescale target must be positive");
  if (width == logits.width && height == logits.height) return logits;
  const auto cols = Taps(logits.width, width);
  const auto rows = Taps(logits.height, height);
  LogitMap out(width, height, logits.classes);
  const auto src_w = static_cast<std::size_t>(logits.width);
  for (int c = 0; c < logits.classes; ++c) {
    const float* src = logits.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < height; ++y) {
      const Tap& ry = rows[static_cast<std::size_t>(y)];
      const float* r0 = src + static_cast<std::size_t>(ry.i0) * src_w;
      const float* r1 = src + static_cast<std::size_t>(ry.i1) * src_w;
      for (int x = 0; x < width; ++x) {
        const Tap& cx = cols[static_cast<std::size_t>(x)];
        const double a = r0[cx.i0], b = r0[cx.i1];
        const double c0 = r1[cx.i0], d = r1[cx.i1];
        const double top = a + cx.t * (b - a);
        const double bottom = c0 + cx.t * (d - c0);
        dst[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
            static_cast<float>(top + ry.t * (bottom - top));
      }
    }
  }
  return out;
}

LogitMap hflip_logits(const LogitMap& logits) {
  CheckShape(logits);
  LogitMap out = logits;
  const auto w = static_cast<std::size_t>(logits.width);
  for (int c = 0; c < out.classes; ++c) {
    float* p = out.plane(c);
    for (int y = 0; y < out.height; ++y) std::reverse(p + static_cast<std::size_t>(y) * w, p + (static_cast<std::size_t>(y) + 1) * w);
  }
  return out;
}

LogitMap aggregate(std::span<const LogitMap> maps) {
  if (maps.empty()) throw ArgumentError("aggregate needs at least one logit map");
  const LogitMap& first = maps.front();
  CheckShape(first);
  for (const auto& m : maps) {
    if (m.width != first.width || m.height != first.height || m.classes != first.classes) {
      throw ArgumentError("aggregate: logit maps differ in shape");
    }
    CheckShape(m);
  }
  if (maps.size() == 1) return first;

  LogitMap out(first.width, first.height, first.classes);
  const double n = static_cast<double>(maps.size());
  std::vector<double> values(maps.size());
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    for (std::size_t k = 0; k < maps.size(); ++k) values[k] = maps[k].data[i];
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    out.data[i] = static_cast<float>(sum / n);
  }
  return out;
}

LogitMap softmax(const LogitMap& logits) {
  CheckShape(logits);
  LogitMap out(logits.width, logits.height, logits.classes);
  const std::size_t plane = logits.plane_size();
  for (std::size_t p = 0; p < plane; ++p) {
    double max = -INFINITY;
    for (int c = 0; c < logits.classes; ++c) max = std::max(max, static_cast<double>(logits.plane(c)[p]));
    double total = 0.0;
    for (int c = 0; c < logits.classes; ++c) total += std::exp(static_cast<double>(logits.plane(c)[p]) - max);
    for (int c = 0; c < logits.classes; ++c) {
      out.plane(c)[p] = static_cast<float>(std::exp(static_cast<double>(logits.plane(c)[p]) - max) / total);
    }
  }
  return out;
}

MaskImage argmax_mask(const LogitMap& logits, std::string space) {
  CheckShape(logits);
  if (logits.classes > 256) {
    throw ArgumentError("argmax_mask: " + std::to_string(logits.classes) + " classes do not fit an 8-bit mask");
  }
  MaskImage mask(logits.width, logits.height, std::move(space));
  const std::size_t plane = logits.plane_size();
  std::vector<float> best(logits.plane(0), logits.plane(0) + plane);
  for (std::size_t p = 0; p < plane; ++p) {
    if (!std::isfinite(best[p])) {
      throw DataError("non-finite logit at class 0, pixel (" + std::to_string(p % static_cast<std::size_t>(logits.width)) +
                      ", " + std::to_string(p / static_cast<std::size_t>(logits.width)) + ")");
    }
  }
  for (int c = 1; c < logits.classes; ++c) {
    const float* src = logits.plane(c);
    for (std::size_t p = 0; p < plane; ++p) {
      const float v = src[p];
      if (!std::isfinite(v)) {
        throw DataError("non-finite logit at class " + std::to_string(c) + ", pixel (" +
                        std::to_string(p % static_cast<std::size_t>(logits.width)) + ", " +
                        std::to_string(p / static_cast<std::size_t>(logits.width)) + ")");
      }
      if (v > best[p]) {  // strict: ties keep the lower class
        best[p] = v;
        mask.data[p] = static_cast<std::uint8_t>(c);
      }
    }
  }
  return mask;
}

TtaResult run_tta(const std::string& image_path, ImageSize original, Predictor& predictor,
                  const TtaConfig& cfg, std::string space) {
  cfg.validate();
  if (original.width <= 0 || original.height <= 0) throw ArgumentError("run_tta: empty image");

  std::vector<LogitMap> realigned;
  realigned.reserve(cfg.predictor_calls());
  TtaResult result;
  int classes = -1;
  for (double ratio : cfg.ratios) {
    const ImageSize fitted =
        fit_keep_aspect(original, static_cast<int>(std::floor(cfg.base_width * ratio)),
                        static_cast<int>(std::floor(cfg.base_height * ratio)));
    for (bool flip : {false, true}) {
      if (flip && !cfg.flip) continue;
      LogitMap logits;
      try {
        logits = predictor.predict(PredictRequest{image_path, fitted.width, fitted.height, flip});
      } catch (const PredictorError& e) {
        throw PredictorError("ratio " + RatioLabel(ratio) + (flip ? ", flipped" : ", unflipped") + ": " + e.what());
      }
      ++result.predictor_calls;
      if (classes >= 0 && logits.classes != classes) {
        throw PredictorError("predictor changed its class count from " + std::to_string(classes) + " to " +
                             std::to_string(logits.classes));
      }
      classes = logits.classes;
      if (flip) logits = hflip_logits(logits);
      if (cfg.fusion == FusionRule::kProbMeanPreRescale) logits = softmax(logits);
      logits = rescale_logits(logits, original.width, original.height);
      if (cfg.fusion == FusionRule::kProbMean) logits = softmax(logits);
      realigned.push_back(std::move(logits));
    }
  }
  result.mask = argmax_mask(aggregate(realigned), std::move(space));
  return result;
}

TtaResult run_tta(const std::string& image_path, Predictor& predictor, const TtaConfig& cfg, std::string space) {
  const auto size = read_image_size(image_path);
  if (!size) throw DataError("cannot read the size of '" + image_path + "'");
  return run_tta(image_path, *size, predictor, cfg, std::move(space));
}

}  // namespace segkit
