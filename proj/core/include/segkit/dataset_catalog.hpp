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

// The nine training datasets, manifest construction from a directory tree,
// and checks of a manifest against the expected split sizes.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segkit/label_space.hpp"

namespace segkit {

enum class Scene { kNatural, kDriving, kIndoor, kArtificial };
enum class Split { kTrain, kVal };

std::string_view to_string(Scene scene);
std::string_view to_string(Split split);
std::optional<Scene> parse_scene(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

struct DatasetDescriptor {
  std::string name;
  Scene scene = Scene::kNatural;
  std::uint64_t train_count = 0;
  std::uint64_t val_count = 0;
  // Class counts of the original and the projected label space.
  std::uint32_t original_classes = 0;
  std::uint32_t projected_classes = 0;
  std::string mapping_file;
  // Directory templates relative to the dataset root; "{split}" expands to
  // "train" or "val".
  std::string image_dir = "images/{split}";
  std::string mask_dir = "masks/{split}";
  // Pairing is by shared stem: an image "<stem><image suffix>" pairs with the
  // mask "<stem><mask_suffix>" at the same relative path.
  std::vector<std::string> image_suffixes = {".jpg", ".png"};
  std::string mask_suffix = ".png";

  std::uint64_t count(Split split) const {
    return split == Split::kTrain ? train_count : val_count;
  }
};

using Catalog = std::vector<DatasetDescriptor>;

/// The nine datasets with their published split sizes and class counts.
Catalog builtin_catalog();

/// Loads a catalog from JSON: an array of descriptor objects. Missing fields
/// fall back to the builtin entry of the same name, or to defaults.
Catalog load_catalog(std::string_view json_text);

/// Case-, space-, dash- and underscore-insensitive lookup ("wilddash_2"
/// finds "WildDash 2").
const DatasetDescriptor* find_dataset(const Catalog& catalog, std::string_view name);
std::string normalize_dataset_name(std::string_view name);

struct SampleRecord {
  std::string dataset;
  Split split = Split::kTrain;
  std::string image_path;
  std::string mask_path;
  std::optional<int> width;
  std::optional<int> height;

  bool operator==(const SampleRecord&) const = default;
};

struct SplitCounts {
  std::uint64_t train = 0;
  std::uint64_t val = 0;

  bool operator==(const SplitCounts&) const = default;
};

class Manifest {
 public:
  Manifest() = default;
  /// Sorts records by (dataset, split, image_path) and tallies counts.
  explicit Manifest(std::vector<SampleRecord> records);

  const std::vector<SampleRecord>& records() const { return records_; }
  const std::map<std::string, SplitCounts>& counts() const { return counts_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Records of one dataset and split, in manifest order.
  std::vector<const SampleRecord*> select(std::string_view dataset, Split split) const;

  /// Line-delimited JSON, one record per line with the fields
  /// dataset, split, image, mask, width, height.
  std::string serialize() const;
  /// FNV-1a 64 over serialize().
  std::string checksum() const;

  static Manifest parse(std::string_view jsonl);
  static Manifest concat(const Manifest& a, const Manifest& b);

 private:
  std::vector<SampleRecord> records_;
  std::map<std::string, SplitCounts> counts_;
};

struct ManifestBuild {
  Manifest manifest;
  std::vector<std::string> warnings;
  std::vector<std::string> orphan_images;  // images without a mask
};

/// Scans `root` for both splits of `desc`. Missing split directories produce
/// warnings; an unreadable root is an IoError.
ManifestBuild build_manifest(const DatasetDescriptor& desc, const std::filesystem::path& root);

struct SplitCheck {
  Split split = Split::kTrain;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
  std::int64_t delta() const {
    return static_cast<std::int64_t>(actual) - static_cast<std::int64_t>(expected);
  }
};

struct ManifestVerification {
  bool ok = true;
  std::string dataset;
  std::vector<SplitCheck> splits;  // train then val
  std::vector<std::string> mismatches;
};

ManifestVerification verify_manifest(const Manifest& manifest, const DatasetDescriptor& desc);

/// Per-class pixel counts indexed by class id (length = space.extent()).
/// Void pixels are not counted.
using ClassHistogram = std::vector<std::uint64_t>;

/// Adds one mask into `hist`. Throws DataError naming `source` and the pixel
/// coordinate for values outside `space`.
void accumulate_histogram(ClassHistogram& hist, const MaskImage& mask, const LabelSpace& space,
                          std::string_view source = {});

/// Histogram over every mask in the manifest.
ClassHistogram class_histogram(const Manifest& manifest, const LabelSpace& space);

}  // namespace segkit
