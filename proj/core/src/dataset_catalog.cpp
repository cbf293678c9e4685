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

#include "segkit/dataset_catalog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <system_error>

#include <json.hpp>

#include "segkit/errors.hpp"
#include "segkit/file_util.hpp"
#include "segkit/image_io.hpp"

namespace segkit {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

DatasetDescriptor Generic(std::string name, Scene scene, std::uint64_t train, std::uint64_t val,
                          std::uint32_t orig, std::uint32_t proj, std::string mapping) {
  DatasetDescriptor d;
  d.name = std::move(name);
  d.scene = scene;
  d.train_count = train;
  d.val_count = val;
  d.original_classes = orig;
  d.projected_classes = proj;
  d.mapping_file = std::move(mapping);
  return d;
}

std::string ExpandSplit(std::string pattern, Split split) {
  const std::string token = "{split}";
  for (auto pos = pattern.find(token); pos != std::string::npos; pos = pattern.find(token)) {
    pattern.replace(pos, token.size(), to_string(split));
  }
  return pattern;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view to_string(Scene scene) {
  switch (scene) {
    case Scene::kNatural: return "natural";
    case Scene::kDriving: return "driving";
    case Scene::kIndoor: return "indoor";
    case Scene::kArtificial: return "artificial";
  }
  return "natural";
}

std::string_view to_string(Split split) { return split == Split::kTrain ? "train" : "val"; }

std::optional<Scene> parse_scene(std::string_view text) {
  for (Scene s : {Scene::kNatural, Scene::kDriving, Scene::kIndoor, Scene::kArtificial}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  return std::nullopt;
}

Catalog builtin_catalog() {
  Catalog c;
  c.push_back(Generic("COCO", Scene::kNatural, 118287, 5000, 201, 133, "coco.csv"));
  c.push_back(Generic("ADE20K", Scene::kNatural, 20210, 2000, 151, 146, "ade20k.csv"));
  auto cityscapes = Generic("Cityscapes", Scene::kDriving, 2975, 500, 34, 31, "cityscapes.csv");
  cityscapes.image_dir = "leftImg8bit/{split}";
  cityscapes.mask_dir = "gtFine/{split}";
  cityscapes.image_suffixes = {"_leftImg8bit.png"};
  cityscapes.mask_suffix = "_gtFine_labelIds.png";
  c.push_back(std::move(cityscapes));
  c.push_back(Generic("Vistas", Scene::kDriving, 18000, 2000, 66, 64, "vistas.csv"));
  c.push_back(Generic("BDD", Scene::kDriving, 7000, 1000, 19, 19, "bdd.csv"));
  c.push_back(Generic("IDD", Scene::kDriving, 6993, 981, 39, 26, "idd.csv"));
  c.push_back(Generic("WildDash2", Scene::kDriving, 3413, 857, 34, 31, "wilddash2.csv"));
  c.push_back(Generic("ScanNet", Scene::kIndoor, 19466, 5436, 41, 41, "scannet.csv"));
  c.push_back(Generic("VIPER", Scene::kArtificial, 13367, 4959, 32, 32, "viper.csv"));
  return c;
}

std::string normalize_dataset_name(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (ch == ' ' || ch == '_' || ch == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

const DatasetDescriptor* find_dataset(const Catalog& catalog, std::string_view name) {
  const std::string key = normalize_dataset_name(name);
  for (const auto& d : catalog) {
    if (normalize_dataset_name(d.name) == key) return &d;
  }
  return nullptr;
}

Catalog load_catalog(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("catalog: top level must be an array");
  const Catalog builtin = builtin_catalog();
  Catalog out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "catalog entry " + std::to_string(i);
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
      throw ParseError(where + ": object with a string 'name' required");
    }
    const std::string name = item["name"].get<std::string>();
    DatasetDescriptor d;
    if (const auto* base = find_dataset(builtin, name)) d = *base;
    d.name = name;
    try {
      if (item.contains("scene")) {
        auto scene = parse_scene(item["scene"].get<std::string>());
        if (!scene) throw ParseError(where + ": unknown scene");
        d.scene = *scene;
      }
      if (item.contains("train_count")) d.train_count = item["train_count"].get<std::uint64_t>();
      if (item.contains("val_count")) d.val_count = item["val_count"].get<std::uint64_t>();
      if (item.contains("original_classes")) d.original_classes = item["original_classes"].get<std::uint32_t>();
      if (item.contains("projected_classes")) d.projected_classes = item["projected_classes"].get<std::uint32_t>();
      if (item.contains("mapping_file")) d.mapping_file = item["mapping_file"].get<std::string>();
      if (item.contains("image_dir")) d.image_dir = item["image_dir"].get<std::string>();
      if (item.contains("mask_dir")) d.mask_dir = item["mask_dir"].get<std::string>();
      if (item.contains("image_suffixes")) d.image_suffixes = item["image_suffixes"].get<std::vector<std::string>>();
      if (item.contains("mask_suffix")) d.mask_suffix = item["mask_suffix"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (d.train_count == 0 || d.val_count == 0) {
      throw ValidationError(where + ": counts must be positive", {name});
    }
    if (!names.insert(normalize_dataset_name(name)).second) {
      throw ValidationError("catalog: duplicate dataset", {name});
    }
    out.push_back(std::move(d));
  }
  return out;
}

Manifest::Manifest(std::vector<SampleRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const SampleRecord& a, const SampleRecord& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    if (a.split != b.split) return a.split < b.split;
    return a.image_path < b.image_path;
  });
  for (const auto& r : records_) {
    auto& c = counts_[r.dataset];
    (r.split == Split::kTrain ? c.train : c.val) += 1;
  }
}

std::vector<const SampleRecord*> Manifest::select(std::string_view dataset, Split split) const {
  std::vector<const SampleRecord*> out;
  for (const auto& r : records_) {
    if (r.dataset == dataset && r.split == split) out.push_back(&r);
  }
  return out;
}

std::string Manifest::serialize() const {
  std::string out;
  for (const auto& r : records_) {
    ordered_json j;
    j["dataset"] = r.dataset;
    j["split"] = to_string(r.split);
    j["image"] = r.image_path;
    j["mask"] = r.mask_path;
    j["width"] = r.width ? ordered_json(*r.width) : ordered_json(nullptr);
    j["height"] = r.height ? ordered_json(*r.height) : ordered_json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string Manifest::checksum() const { return fnv1a64_hex(serialize()); }

Manifest Manifest::parse(std::string_view jsonl) {
  std::vector<SampleRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SampleRecord r;
      r.dataset = j.at("dataset").get<std::string>();
      auto split = parse_split(j.at("split").get<std::string>());
      if (!split) throw ParseError("unknown split", line_no);
      r.split = *split;
      r.image_path = j.at("image").get<std::string>();
      r.mask_path = j.at("mask").get<std::string>();
      if (j.contains("width") && !j["width"].is_null()) r.width = j["width"].get<int>();
      if (j.contains("height") && !j["height"].is_null()) r.height = j["height"].get<int>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest: ") + e.what(), line_no);
    }
  }
  return Manifest(std::move(records));
}

Manifest Manifest::concat(const Manifest& a, const Manifest& b) {
  std::vector<SampleRecord> all = a.records_;
  all.insert(all.end(), b.records_.begin(), b.records_.end());
  return Manifest(std::move(all));
}

ManifestBuild build_manifest(const DatasetDescriptor& desc, const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("dataset root '" + root.string() + "' is not a readable directory");
  }
  ManifestBuild out;
  std::vector<SampleRecord> records;
  // Longest suffix first so "_leftImg8bit.png" beats ".png".
  std::vector<std::string> suffixes = desc.image_suffixes;
  std::sort(suffixes.begin(), suffixes.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

  for (Split split : {Split::kTrain, Split::kVal}) {
    const fs::path image_dir = root / ExpandSplit(desc.image_dir, split);
    const fs::path mask_dir = root / ExpandSplit(desc.mask_dir, split);
    if (!fs::is_directory(image_dir, ec)) {
      out.warnings.push_back(desc.name + " " + std::string(to_string(split)) +
                             ": no image directory " + image_dir.string());
      continue;
    }
    std::set<std::string> paired_masks;
    std::vector<fs::path> images;
    for (fs::recursive_directory_iterator it(image_dir, ec), end; !ec && it != end; it.increment(ec)) {
      if (it->is_regular_file()) images.push_back(it->path());
    }
    if (ec) throw IoError("cannot scan '" + image_dir.string() + "': " + ec.message());
    std::sort(images.begin(), images.end());

    for (const auto& image : images) {
      const std::string rel = fs::relative(image, image_dir).generic_string();
      const auto suffix = std::find_if(suffixes.begin(), suffixes.end(),
                                       [&](const std::string& s) { return EndsWith(rel, s); });
      if (suffix == suffixes.end()) continue;
      const std::string stem = rel.substr(0, rel.size() - suffix->size());
      const fs::path mask = mask_dir / (stem + desc.mask_suffix);
      if (!fs::is_regular_file(mask, ec)) {
        out.orphan_images.push_back(image.generic_string());
        out.warnings.push_back("no mask for image " + image.generic_string());
        continue;
      }
      paired_masks.insert(mask.generic_string());

      SampleRecord r{desc.name, split, image.generic_string(), mask.generic_string(),
                     std::nullopt, std::nullopt};
      const auto mask_size = read_image_size(mask);
      if (mask_size) {
        const auto image_size = read_image_size(image);
        if (image_size && *image_size != *mask_size) {
          out.warnings.push_back("dimension mismatch between " + r.image_path + " and " +
                                 r.mask_path + "; skipped");
          continue;
        }
        r.width = mask_size->width;
        r.height = mask_size->height;
      }
      records.push_back(std::move(r));
    }

    if (fs::is_directory(mask_dir, ec)) {
      for (fs::recursive_directory_iterator it(mask_dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        const std::string p = it->path().generic_string();
        if (EndsWith(p, desc.mask_suffix) && !paired_masks.count(p)) {
          out.warnings.push_back("no image for mask " + p);
        }
      }
    }
  }
  if (records.empty()) out.warnings.push_back(desc.name + ": no samples found under " + root.string());
  out.manifest = Manifest(std::move(records));
  return out;
}

ManifestVerification verify_manifest(const Manifest& manifest, const DatasetDescriptor& desc) {
  ManifestVerification v;
  v.dataset = desc.name;
  SplitCounts actual;
  if (auto it = manifest.counts().find(desc.name); it != manifest.counts().end()) actual = it->second;
  for (Split split : {Split::kTrain, Split::kVal}) {
    SplitCheck check{split, desc.count(split), split == Split::kTrain ? actual.train : actual.val};
    if (check.delta() != 0) {
      v.ok = false;
      v.mismatches.push_back(desc.name + " " + std::string(to_string(split)) + ": expected " +
                             std::to_string(check.expected) + ", found " +
                             std::to_string(check.actual) + " (delta " +
                             std::to_string(check.delta()) + ")");
    }
    v.splits.push_back(check);
  }
  return v;
}

void accumulate_histogram(ClassHistogram& hist, const MaskImage& mask, const LabelSpace& space,
                          std::string_view source) {
  if (hist.size() < space.extent()) hist.resize(space.extent(), 0);
  std::array<std::uint64_t, 256> local{};
  for (std::uint8_t v : mask.data) ++local[v];
  const auto void_id = space.void_id();
  for (std::size_t v = 0; v < local.size(); ++v) {
    if (local[v] == 0) continue;
    if (void_id && *void_id == v) continue;
    if (!space.contains(static_cast<ClassId>(v))) {
      const auto it = std::find(mask.data.begin(), mask.data.end(), static_cast<std::uint8_t>(v));
      const auto i = static_cast<std::size_t>(it - mask.data.begin());
      const auto w = static_cast<std::size_t>(mask.width);
      throw DataError((source.empty() ? std::string("mask") : "'" + std::string(source) + "'") +
                      ": pixel (" + std::to_string(i % w) + ", " + std::to_string(i / w) +
                      ") has value " + std::to_string(v) + " outside '" + space.name() + "'");
    }
    hist[v] += local[v];
  }
}

ClassHistogram class_histogram(const Manifest& manifest, const LabelSpace& space) {
  ClassHistogram hist(space.extent(), 0);
  for (const auto& r : manifest.records()) {
    accumulate_histogram(hist, read_mask_png(r.mask_path, space.name()), space, r.mask_path);
  }
  return hist;
}

}  // namespace segkit
