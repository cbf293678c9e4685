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

// Training-time augmentation of (image, mask) pairs: random keep-aspect
// resize, random crop with padding, horizontal flip and photometric
// distortion, applied in that order.
//
// Every random decision is first drawn into an AugDraws record and then
// applied, so a logged AugDraws replays the exact output. docs/determinism.md
// gives the resampling and colour formulas.

#include <cstdint>
#include <string>
#include <string_view>

#include "segkit/image.hpp"
#include "segkit/image_io.hpp"
#include "segkit/label_space.hpp"
#include "segkit/rng.hpp"

namespace segkit {

struct PhotometricParams {
  double brightness_delta = 32.0;
  double contrast_lower = 0.5;
  double contrast_upper = 1.5;
  double saturation_lower = 0.5;
  double saturation_upper = 1.5;
  int hue_delta = 18;        // in 8-bit hue units, 180 per turn
  double apply_prob = 0.5;   // per operation
};

struct AugConfig {
  int base_width = 2048;
  int base_height = 1024;
  double ratio_min = 0.5;
  double ratio_max = 2.0;
  int crop_width = 1024;
  int crop_height = 1024;
  double flip_prob = 0.5;
  std::uint8_t mask_pad = static_cast<std::uint8_t>(kUnifiedVoid);
  PhotometricParams photometric;

  /// Throws ArgumentError on an inconsistent configuration.
  void validate() const;
};

struct PhotometricDraws {
  bool brightness = false;
  double brightness_delta = 0.0;
  bool contrast_first = false;  // contrast before (true) or after colour ops
  bool contrast = false;
  double contrast_alpha = 1.0;
  bool saturation = false;
  double saturation_alpha = 1.0;
  bool hue = false;
  int hue_shift = 0;

  bool operator==(const PhotometricDraws&) const = default;
};

struct AugDraws {
  double ratio = 1.0;
  int crop_x = 0;
  int crop_y = 0;
  bool flip = false;
  PhotometricDraws photometric;

  bool operator==(const AugDraws&) const = default;
};

struct AugPair {
  ImageBuffer image;
  MaskImage mask;
};

struct AugResult {
  ImageBuffer image;
  MaskImage mask;
  AugDraws draws;
};

/// Keep-aspect fit of `src` into a (box_long, box_short) box: the scale is
/// min(long / max(w, h), short / min(w, h)) and each side is rounded half up.
ImageSize fit_keep_aspect(ImageSize src, int box_width, int box_height);

/// Size after the resize stage for ratio r: fit into
/// (floor(base_width * r), floor(base_height * r)).
ImageSize resized_size(ImageSize src, const AugConfig& cfg, double ratio);

/// Fixed-point bilinear with half-pixel centres and edge clamping.
ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height);
/// Nearest neighbour with half-pixel centres; never creates new values.
MaskImage resize_nearest(const MaskImage& mask, int width, int height);

AugPair random_resize(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                      RngStream& rng);

/// Pads to at least crop size (image 0, mask `mask_pad`, bottom/right) and
/// cuts the crop_width x crop_height window at (x, y).
AugPair crop_pair(const ImageBuffer& image, const MaskImage& mask, int x, int y, int crop_width,
                  int crop_height, std::uint8_t mask_pad);
AugPair random_crop(const ImageBuffer& image, const MaskImage& mask, int crop_width,
                    int crop_height, RngStream& rng,
                    std::uint8_t mask_pad = static_cast<std::uint8_t>(kUnifiedVoid));

ImageBuffer hflip_image(const ImageBuffer& image);
MaskImage hflip_mask(const MaskImage& mask);

struct FlipResult {
  ImageBuffer image;
  MaskImage mask;
  bool flipped = false;
};

FlipResult random_flip(const ImageBuffer& image, const MaskImage& mask, double p, RngStream& rng);

PhotometricDraws draw_photometric(const PhotometricParams& params, RngStream& rng);
ImageBuffer apply_photometric(const ImageBuffer& image, const PhotometricDraws& draws);
ImageBuffer photometric_distortion(const ImageBuffer& image, const PhotometricParams& params,
                                   RngStream& rng);

/// Draws every random decision of the pipeline for an input of size `input`.
/// The number of words consumed from `rng` does not depend on the outcome.
AugDraws draw_augmentation(ImageSize input, const AugConfig& cfg, RngStream& rng);

/// Resize, crop, flip and photometric distortion from fixed draws. Resize and
/// crop are fused so only the crop window is resampled.
AugPair apply_augmentation(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                           const AugDraws& draws);

/// draw_augmentation followed by apply_augmentation.
AugResult train_pipeline(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                         RngStream& rng);

std::string draws_to_json(const AugDraws& draws);
AugDraws draws_from_json(std::string_view text);

// Colour space used by the saturation and hue operations: 8-bit HSV with hue
// in [0, 180).
struct Hsv {
  std::uint8_t h = 0;
  std::uint8_t s = 0;
  std::uint8_t v = 0;
};
Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
void hsv_to_rgb(Hsv hsv, std::uint8_t* rgb);

}  // namespace segkit
