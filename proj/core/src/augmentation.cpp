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

#include "segkit/augmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

#include "segkit/errors.hpp"

namespace segkit {
namespace {

constexpr std::uint32_t kWeightBits = 11;
constexpr std::uint32_t kWeightOne = 1u << kWeightBits;  // 2048

// Source taps of one output coordinate along one axis.
struct LinearTap {
  int i0 = 0;
  int i1 = 0;
  std::uint32_t w0 = kWeightOne;
  std::uint32_t w1 = 0;
};

LinearTap ComputeTap(int dst, int src_size, int dst_size) {
  const double scale = static_cast<double>(src_size) / static_cast<double>(dst_size);
  const double f = (static_cast<double>(dst) + 0.5) * scale - 0.5;
  double base = std::floor(f);
  double t = f - base;
  int i0 = static_cast<int>(base);
  if (i0 < 0) {
    i0 = 0;
    t = 0.0;
  }
  if (i0 >= src_size - 1) {
    i0 = src_size - 1;
    t = 0.0;
  }
  LinearTap tap;
  tap.i0 = i0;
  tap.i1 = std::min(i0 + 1, src_size - 1);
  tap.w1 = static_cast<std::uint32_t>(std::floor(t * kWeightOne + 0.5));
  tap.w0 = kWeightOne - tap.w1;
  return tap;
}

std::vector<LinearTap> LinearTaps(int begin, int count, int src_size, int dst_size) {
  std::vector<LinearTap> taps(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) taps[static_cast<std::size_t>(i)] = ComputeTap(begin + i, src_size, dst_size);
  return taps;
}

int NearestIndex(int dst, int src_size, int dst_size) {
  const double scale = static_cast<double>(src_size) / static_cast<double>(dst_size);
  const int i = static_cast<int>(std::floor((static_cast<double>(dst) + 0.5) * scale));
  return std::clamp(i, 0, src_size - 1);
}

std::vector<int> NearestTaps(int begin, int count, int src_size, int dst_size) {
  std::vector<int> taps(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) taps[static_cast<std::size_t>(i)] = NearestIndex(begin + i, src_size, dst_size);
  return taps;
}

void CheckPair(const ImageBuffer& image, const MaskImage& mask) {
  if (image.width <= 0 || image.height <= 0) throw ArgumentError("empty image");
  if (image.width != mask.width || image.height != mask.height) {
    throw ArgumentError("image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                        " but mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height));
  }
  if (image.data.size() != image.pixel_count() * ImageBuffer::kChannels ||
      mask.data.size() != mask.pixel_count()) {
    throw ArgumentError("buffer length does not match dimensions");
  }
}

// Writes the resized-then-cropped window: output pixel (x, y) samples the
// resized image at (origin_x + x, origin_y + y). Pixels outside the resized
// extent keep their padding values.
void ResampleImageWindow(const ImageBuffer& image, ImageSize resized, int origin_x, int origin_y,
                         ImageBuffer& out) {
  const int valid_w = std::clamp(resized.width - origin_x, 0, out.width);
  const int valid_h = std::clamp(resized.height - origin_y, 0, out.height);
  const auto cols = LinearTaps(origin_x, valid_w, image.width, resized.width);
  const auto rows = LinearTaps(origin_y, valid_h, image.height, resized.height);

  const std::size_t src_stride = static_cast<std::size_t>(image.width) * 3;
  constexpr std::uint32_t kRound = 1u << (2 * kWeightBits - 1);
  const std::size_t row_len = static_cast<std::size_t>(valid_w) * 3;

  // Horizontal pass of one source row; cached because neighbouring output
  // rows usually share their source rows.
  std::vector<std::uint32_t> rows_buf[2] = {std::vector<std::uint32_t>(row_len),
                                            std::vector<std::uint32_t>(row_len)};
  int cached[2] = {-1, -1};
  auto horizontal = [&](int src_row) -> const std::uint32_t* {
    for (int k = 0; k < 2; ++k) {
      if (cached[k] == src_row) return rows_buf[k].data();
    }
    // Evict the slot holding the lower row; rows only move downwards.
    const int k = cached[0] < cached[1] ? 0 : 1;
    const std::uint8_t* src = image.data.data() + static_cast<std::size_t>(src_row) * src_stride;
    std::uint32_t* dst = rows_buf[k].data();
    for (int x = 0; x < valid_w; ++x) {
      const LinearTap& cx = cols[static_cast<std::size_t>(x)];
      const std::uint8_t* a = src + static_cast<std::size_t>(cx.i0) * 3;
      const std::uint8_t* b = src + static_cast<std::size_t>(cx.i1) * 3;
      dst[x * 3 + 0] = cx.w0 * a[0] + cx.w1 * b[0];
      dst[x * 3 + 1] = cx.w0 * a[1] + cx.w1 * b[1];
      dst[x * 3 + 2] = cx.w0 * a[2] + cx.w1 * b[2];
    }
    cached[k] = src_row;
    return dst;
  };

  for (int y = 0; y < valid_h; ++y) {
    const LinearTap& ry = rows[static_cast<std::size_t>(y)];
    const std::uint32_t* top = horizontal(ry.i0);
    const std::uint32_t* bottom = horizontal(ry.i1);
    std::uint8_t* dst = out.pixel(0, y);
    for (std::size_t i = 0; i < row_len; ++i) {
      dst[i] = static_cast<std::uint8_t>((ry.w0 * top[i] + ry.w1 * bottom[i] + kRound) >> (2 * kWeightBits));
    }
  }
}

void ResampleMaskWindow(const MaskImage& mask, ImageSize resized, int origin_x, int origin_y,
                        MaskImage& out) {
  const int valid_w = std::clamp(resized.width - origin_x, 0, out.width);
  const int valid_h = std::clamp(resized.height - origin_y, 0, out.height);
  const auto cols = NearestTaps(origin_x, valid_w, mask.width, resized.width);
  const auto rows = NearestTaps(origin_y, valid_h, mask.height, resized.height);
  for (int y = 0; y < valid_h; ++y) {
    const std::uint8_t* src = mask.data.data() + static_cast<std::size_t>(rows[static_cast<std::size_t>(y)]) *
                                                      static_cast<std::size_t>(mask.width);
    std::uint8_t* dst = out.data.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(out.width);
    for (int x = 0; x < valid_w; ++x) dst[x] = src[cols[static_cast<std::size_t>(x)]];
  }
}

void FlipInPlace(ImageBuffer& image, MaskImage& mask) {
  for (int y = 0; y < image.height; ++y) {
    std::uint8_t* row = image.pixel(0, y);
    for (int l = 0, r = image.width - 1; l < r; ++l, --r) {
      std::swap_ranges(row + l * 3, row + l * 3 + 3, row + r * 3);
    }
  }
  for (int y = 0; y < mask.height; ++y) {
    auto* row = mask.data.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(mask.width);
    std::reverse(row, row + mask.width);
  }
}

std::uint8_t Saturate(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v);  // truncation, as an 8-bit cast
}

using Lut = std::array<std::uint8_t, 256>;

Lut LinearLut(double alpha, double beta) {
  Lut lut;
  for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = Saturate(v * alpha + beta);
  return lut;
}

Lut Compose(const Lut& first, const Lut& second) {
  Lut out;
  for (std::size_t v = 0; v < 256; ++v) out[v] = second[first[v]];
  return out;
}

void ApplyLut(ImageBuffer& image, const Lut& lut) {
  for (auto& v : image.data) v = lut[v];
}

}  // namespace

void AugConfig::validate() const {
  if (base_width <= 0 || base_height <= 0) throw ArgumentError("base scale must be positive");
  if (!(ratio_min > 0.0) || ratio_min > ratio_max) throw ArgumentError("ratio range must satisfy 0 < min <= max");
  if (crop_width <= 0 || crop_height <= 0) throw ArgumentError("crop size must be positive");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw ArgumentError("flip probability must be in [0, 1]");
  const auto& p = photometric;
  if (p.brightness_delta < 0 || p.hue_delta < 0) throw ArgumentError("photometric deltas must be >= 0");
  if (!(p.contrast_lower > 0 && p.contrast_lower <= p.contrast_upper) ||
      !(p.saturation_lower > 0 && p.saturation_lower <= p.saturation_upper)) {
    throw ArgumentError("photometric ranges must be positive and ordered");
  }
  if (!(p.apply_prob >= 0.0 && p.apply_prob <= 1.0)) throw ArgumentError("photometric probability must be in [0, 1]");
}

ImageSize fit_keep_aspect(ImageSize src, int box_width, int box_height) {
  if (src.width <= 0 || src.height <= 0) throw ArgumentError("cannot resize an empty image");
  if (box_width <= 0 || box_height <= 0) throw ArgumentError("resize box must be positive");
  const double box_long = std::max(box_width, box_height);
  const double box_short = std::min(box_width, box_height);
  const double src_long = std::max(src.width, src.height);
  const double src_short = std::min(src.width, src.height);
  const double scale = std::min(box_long / src_long, box_short / src_short);
  const int w = static_cast<int>(std::floor(src.width * scale + 0.5));
  const int h = static_cast<int>(std::floor(src.height * scale + 0.5));
  return ImageSize{std::max(w, 1), std::max(h, 1)};
}

ImageSize resized_size(ImageSize src, const AugConfig& cfg, double ratio) {
  return fit_keep_aspect(src, static_cast<int>(std::floor(cfg.base_width * ratio)),
                         static_cast<int>(std::floor(cfg.base_height * ratio)));
}

ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height) {
  if (image.width <= 0 || image.height <= 0 || width <= 0 || height <= 0) {
    throw ArgumentError("resize_bilinear: empty input or output");
  }
  ImageBuffer out(width, height);
  ResampleImageWindow(image, ImageSize{width, height}, 0, 0, out);
  return out;
}

MaskImage resize_nearest(const MaskImage& mask, int width, int height) {
  if (mask.width <= 0 || mask.height <= 0 || width <= 0 || height <= 0) {
    throw ArgumentError("resize_nearest: empty input or output");
  }
  MaskImage out(width, height, mask.space);
  ResampleMaskWindow(mask, ImageSize{width, height}, 0, 0, out);
  return out;
}

AugPair random_resize(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                      RngStream& rng) {
  CheckPair(image, mask);
  const double ratio = rng.uniform(cfg.ratio_min, cfg.ratio_max);
  const ImageSize size = resized_size(ImageSize{image.width, image.height}, cfg, ratio);
  return AugPair{resize_bilinear(image, size.width, size.height),
                 resize_nearest(mask, size.width, size.height)};
}

AugPair crop_pair(const ImageBuffer& image, const MaskImage& mask, int x, int y, int crop_width,
                  int crop_height, std::uint8_t mask_pad) {
  CheckPair(image, mask);
  const int padded_w = std::max(image.width, crop_width);
  const int padded_h = std::max(image.height, crop_height);
  if (x < 0 || y < 0 || x > padded_w - crop_width || y > padded_h - crop_height) {
    throw ArgumentError("crop origin (" + std::to_string(x) + ", " + std::to_string(y) + ") out of range");
  }
  AugPair out{ImageBuffer(crop_width, crop_height, 0), MaskImage(crop_width, crop_height, mask.space, mask_pad)};
  const int valid_w = std::clamp(image.width - x, 0, crop_width);
  const int valid_h = std::clamp(image.height - y, 0, crop_height);
  for (int row = 0; row < valid_h; ++row) {
    std::copy_n(image.pixel(x, y + row), static_cast<std::size_t>(valid_w) * 3, out.image.pixel(0, row));
    std::copy_n(&mask.data[static_cast<std::size_t>(y + row) * static_cast<std::size_t>(mask.width) +
                           static_cast<std::size_t>(x)],
                valid_w, &out.mask.data[static_cast<std::size_t>(row) * static_cast<std::size_t>(crop_width)]);
  }
  return out;
}

AugPair random_crop(const ImageBuffer& image, const MaskImage& mask, int crop_width, int crop_height,
                    RngStream& rng, std::uint8_t mask_pad) {
  CheckPair(image, mask);
  if (crop_width <= 0 || crop_height <= 0) throw ArgumentError("crop size must be positive");
  const int x = static_cast<int>(rng.uniform_int(0, std::max(image.width, crop_width) - crop_width));
  const int y = static_cast<int>(rng.uniform_int(0, std::max(image.height, crop_height) - crop_height));
  return crop_pair(image, mask, x, y, crop_width, crop_height, mask_pad);
}

ImageBuffer hflip_image(const ImageBuffer& image) {
  ImageBuffer out = image;
  MaskImage none;
  FlipInPlace(out, none);
  return out;
}

MaskImage hflip_mask(const MaskImage& mask) {
  MaskImage out = mask;
  ImageBuffer none;
  FlipInPlace(none, out);
  return out;
}

FlipResult random_flip(const ImageBuffer& image, const MaskImage& mask, double p, RngStream& rng) {
  FlipResult out{image, mask, rng.bernoulli(p)};
  if (out.flipped) FlipInPlace(out.image, out.mask);
  return out;
}

// Draw order is fixed and every value is drawn whether or not its operation
// fires: brightness (apply, delta), contrast position, contrast (apply,
// alpha), saturation (apply, alpha), hue (apply, shift).
PhotometricDraws draw_photometric(const PhotometricParams& params, RngStream& rng) {
  PhotometricDraws d;
  d.brightness = rng.bernoulli(params.apply_prob);
  d.brightness_delta = rng.uniform(-params.brightness_delta, params.brightness_delta);
  d.contrast_first = rng.bernoulli(0.5);
  d.contrast = rng.bernoulli(params.apply_prob);
  d.contrast_alpha = rng.uniform(params.contrast_lower, params.contrast_upper);
  d.saturation = rng.bernoulli(params.apply_prob);
  d.saturation_alpha = rng.uniform(params.saturation_lower, params.saturation_upper);
  d.hue = rng.bernoulli(params.apply_prob);
  d.hue_shift = static_cast<int>(rng.uniform_int(-params.hue_delta, params.hue_delta));
  return d;
}

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int v = std::max({r, g, b});
  const int diff = v - std::min({r, g, b});
  Hsv out;
  out.v = static_cast<std::uint8_t>(v);
  if (diff == 0) return out;
  out.s = static_cast<std::uint8_t>((255 * diff + v / 2) / v);
  // Hue in degrees is base + 60 * n / diff; in 2-degree units, rounded half
  // up, that is base / 2 + floor((60 * n + diff) / (2 * diff)).
  int n, base;
  if (v == r) {
    n = g - b;
    base = 0;
  } else if (v == g) {
    n = b - r;
    base = 120;
  } else {
    n = r - g;
    base = 240;
  }
  const int num = 60 * n + diff;
  const int den = 2 * diff;
  const int q = num >= 0 ? num / den : -((-num + den - 1) / den);  // floor division
  int hh = base / 2 + q;
  if (hh < 0) hh += 180;
  if (hh >= 180) hh -= 180;
  out.h = static_cast<std::uint8_t>(hh);
  return out;
}

void hsv_to_rgb(Hsv hsv, std::uint8_t* rgb) {
  if (hsv.s == 0) {
    rgb[0] = rgb[1] = rgb[2] = hsv.v;
    return;
  }
  // 30 hue units per 60-degree sector; f = rem / 30 and s = hsv.s / 255, so
  // every product below has denominator 255 * 30, rounded half up.
  constexpr int kDen = 255 * 30;
  const int sector = hsv.h / 30;
  const int rem = hsv.h % 30;
  const int v = hsv.v;
  const int s = hsv.s;
  const auto p = static_cast<std::uint8_t>((v * (kDen - 30 * s) + kDen / 2) / kDen);
  const auto q = static_cast<std::uint8_t>((v * (kDen - s * rem) + kDen / 2) / kDen);
  const auto t = static_cast<std::uint8_t>((v * (kDen - s * (30 - rem)) + kDen / 2) / kDen);
  const auto vv = hsv.v;
  switch (sector) {
    case 0: rgb[0] = vv; rgb[1] = t; rgb[2] = p; break;
    case 1: rgb[0] = q; rgb[1] = vv; rgb[2] = p; break;
    case 2: rgb[0] = p; rgb[1] = vv; rgb[2] = t; break;
    case 3: rgb[0] = p; rgb[1] = q; rgb[2] = vv; break;
    case 4: rgb[0] = t; rgb[1] = p; rgb[2] = vv; break;
    default: rgb[0] = vv; rgb[1] = p; rgb[2] = q; break;
  }
}

namespace {

// Exact quotient tables for rgb_to_hsv, indexed by (v, diff) and
// (diff, n + 255). Built once; about 190 KB.
struct HsvTables {
  std::uint8_t sat[256][256];
  std::int8_t hue[256][511];

  HsvTables() {
    for (int v = 1; v < 256; ++v) {
      for (int diff = 0; diff <= v; ++diff) sat[v][diff] = static_cast<std::uint8_t>((255 * diff + v / 2) / v);
    }
    for (int diff = 1; diff < 256; ++diff) {
      for (int n = -diff; n <= diff; ++n) {
        const int num = 60 * n + diff;
        const int den = 2 * diff;
        hue[diff][n + 255] = static_cast<std::int8_t>(num >= 0 ? num / den : -((-num + den - 1) / den));
      }
    }
  }
};

const HsvTables& Tables() {
  static const HsvTables tables;
  return tables;
}

inline Hsv FastRgbToHsv(const HsvTables& t, int r, int g, int b) {
  const int v = std::max({r, g, b});
  const int diff = v - std::min({r, g, b});
  Hsv out;
  out.v = static_cast<std::uint8_t>(v);
  if (diff == 0) return out;
  out.s = t.sat[v][diff];
  // Same case split as rgb_to_hsv, written as selects.
  const bool rmax = v == r;
  const bool gmax = !rmax && v == g;
  const int n = rmax ? g - b : (gmax ? b - r : r - g);
  const int base = rmax ? 0 : (gmax ? 60 : 120);
  int hh = base + t.hue[diff][n + 255];
  hh += hh < 0 ? 180 : 0;
  hh -= hh >= 180 ? 180 : 0;
  out.h = static_cast<std::uint8_t>(hh);
  return out;
}

// hsv_to_rgb with the sector switch replaced by a channel table.
inline void FastHsvToRgb(Hsv hsv, std::uint8_t* rgb) {
  constexpr int kDen = 255 * 30;
  // Indices into {v, p, q, t}.
  static constexpr std::uint8_t kPick[6][3] = {{0, 3, 1}, {2, 0, 1}, {1, 0, 3},
                                               {1, 2, 0}, {3, 1, 0}, {0, 1, 2}};
  const int sector = hsv.h / 30;
  const int rem = hsv.h - sector * 30;
  const int v = hsv.v;
  const int s = hsv.s;
  const std::uint8_t vals[4] = {
      hsv.v,
      static_cast<std::uint8_t>((v * (kDen - 30 * s) + kDen / 2) / kDen),
      static_cast<std::uint8_t>((v * (kDen - s * rem) + kDen / 2) / kDen),
      static_cast<std::uint8_t>((v * (kDen - s * (30 - rem)) + kDen / 2) / kDen)};
  rgb[0] = vals[kPick[sector][0]];
  rgb[1] = vals[kPick[sector][1]];
  rgb[2] = vals[kPick[sector][2]];
}

// Brightness and contrast are 8-bit tables; saturation and hue share one
// HSV round trip. All stages run in a single pass over the pixels.
void ApplyPhotometricInPlace(ImageBuffer& image, const PhotometricDraws& d) {
  Lut identity;
  for (int v = 0; v < 256; ++v) identity[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(v);
  const Lut brightness = d.brightness ? LinearLut(1.0, d.brightness_delta) : identity;
  const Lut contrast = d.contrast ? LinearLut(d.contrast_alpha, 0.0) : identity;
  const Lut before = d.contrast_first ? Compose(brightness, contrast) : brightness;
  const Lut after = d.contrast_first ? identity : contrast;
  const bool colour = d.saturation || d.hue;

  if (!colour) {
    if (d.brightness || d.contrast) ApplyLut(image, Compose(before, after));
    return;
  }
  const Lut sat = d.saturation ? LinearLut(d.saturation_alpha, 0.0) : identity;
  const int shift = d.hue ? ((d.hue_shift % 180) + 180) % 180 : 0;
  const HsvTables& tables = Tables();
  std::uint8_t* px = image.data.data();
  const std::size_t n = image.pixel_count();
  for (std::size_t i = 0; i < n; ++i, px += 3) {
    Hsv hsv = FastRgbToHsv(tables, before[px[0]], before[px[1]], before[px[2]]);
    hsv.s = sat[hsv.s];
    const int h = hsv.h + shift;
    hsv.h = static_cast<std::uint8_t>(h >= 180 ? h - 180 : h);
    FastHsvToRgb(hsv, px);
    px[0] = after[px[0]];
    px[1] = after[px[1]];
    px[2] = after[px[2]];
  }
}

}  // namespace

ImageBuffer apply_photometric(const ImageBuffer& image, const PhotometricDraws& d) {
  ImageBuffer out = image;
  ApplyPhotometricInPlace(out, d);
  return out;
}

ImageBuffer photometric_distortion(const ImageBuffer& image, const PhotometricParams& params,
                                   RngStream& rng) {
  return apply_photometric(image, draw_photometric(params, rng));
}

AugDraws draw_augmentation(ImageSize input, const AugConfig& cfg, RngStream& rng) {
  cfg.validate();
  AugDraws d;
  d.ratio = rng.uniform(cfg.ratio_min, cfg.ratio_max);
  const ImageSize size = resized_size(input, cfg, d.ratio);
  d.crop_x = static_cast<int>(rng.uniform_int(0, std::max(size.width, cfg.crop_width) - cfg.crop_width));
  d.crop_y = static_cast<int>(rng.uniform_int(0, std::max(size.height, cfg.crop_height) - cfg.crop_height));
  d.flip = rng.bernoulli(cfg.flip_prob);
  d.photometric = draw_photometric(cfg.photometric, rng);
  return d;
}

AugPair apply_augmentation(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                           const AugDraws& draws) {
  CheckPair(image, mask);
  cfg.validate();
  const ImageSize size = resized_size(ImageSize{image.width, image.height}, cfg, draws.ratio);
  const int max_x = std::max(size.width, cfg.crop_width) - cfg.crop_width;
  const int max_y = std::max(size.height, cfg.crop_height) - cfg.crop_height;
  if (draws.crop_x < 0 || draws.crop_y < 0 || draws.crop_x > max_x || draws.crop_y > max_y) {
    throw ArgumentError("crop origin outside the resized image");
  }
  AugPair out{ImageBuffer(cfg.crop_width, cfg.crop_height, 0),
              MaskImage(cfg.crop_width, cfg.crop_height, mask.space, cfg.mask_pad)};
  ResampleImageWindow(image, size, draws.crop_x, draws.crop_y, out.image);
  ResampleMaskWindow(mask, size, draws.crop_x, draws.crop_y, out.mask);
  if (draws.flip) FlipInPlace(out.image, out.mask);
  ApplyPhotometricInPlace(out.image, draws.photometric);
  return out;
}

AugResult train_pipeline(const ImageBuffer& image, const MaskImage& mask, const AugConfig& cfg,
                         RngStream& rng) {
  CheckPair(image, mask);
  const AugDraws draws = draw_augmentation(ImageSize{image.width, image.height}, cfg, rng);
  AugPair pair = apply_augmentation(image, mask, cfg, draws);
  return AugResult{std::move(pair.image), std::move(pair.mask), draws};
}

std::string draws_to_json(const AugDraws& d) {
  nlohmann::ordered_json j;
  j["ratio"] = d.ratio;
  j["crop_x"] = d.crop_x;
  j["crop_y"] = d.crop_y;
  j["flip"] = d.flip;
  const auto& p = d.photometric;
  j["photometric"] = {{"brightness", p.brightness},
                      {"brightness_delta", p.brightness_delta},
                      {"contrast_first", p.contrast_first},
                      {"contrast", p.contrast},
                      {"contrast_alpha", p.contrast_alpha},
                      {"saturation", p.saturation},
                      {"saturation_alpha", p.saturation_alpha},
                      {"hue", p.hue},
                      {"hue_shift", p.hue_shift}};
  return j.dump();
}

AugDraws draws_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    AugDraws d;
    d.ratio = j.at("ratio").get<double>();
    d.crop_x = j.at("crop_x").get<int>();
    d.crop_y = j.at("crop_y").get<int>();
    d.flip = j.at("flip").get<bool>();
    const auto& p = j.at("photometric");
    d.photometric.brightness = p.at("brightness").get<bool>();
    d.photometric.brightness_delta = p.at("brightness_delta").get<double>();
    d.photometric.contrast_first = p.at("contrast_first").get<bool>();
    d.photometric.contrast = p.at("contrast").get<bool>();
    d.photometric.contrast_alpha = p.at("contrast_alpha").get<double>();
    d.photometric.saturation = p.at("saturation").get<bool>();
    d.photometric.saturation_alpha = p.at("saturation_alpha").get<double>();
    d.photometric.hue = p.at("hue").get<bool>();
    d.photometric.hue_shift = p.at("hue_shift").get<int>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("augmentation draws: ") + e.what());
  }
}

}  // namespace segkit
