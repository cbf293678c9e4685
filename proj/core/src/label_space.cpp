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

#include "segkit/label_space.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "segkit/csv.hpp"
#include "segkit/errors.hpp"

namespace segkit {
namespace {

const std::vector<std::string> kSpaceHeader = {"id", "name"};
const std::vector<std::string> kMappingHeader = {"source_id", "source_name",
                                                 "target_id", "target_name"};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

ClassId ParseId(const std::string& field, std::size_t line, const char* column) {
  const std::string t = Trim(field);
  ClassId value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(std::string("invalid ") + column + " '" + field + "'", line);
  }
  if (value > 0xFFFFu) {
    throw ParseError(std::string(column) + " " + t + " exceeds 65535", line);
  }
  return value;
}

bool IsVoidName(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "void" || lower == "unlabeled" || lower == "unlabelled" ||
         lower == "ignore";
}

std::optional<ClassId> DetectVoid(const std::vector<ClassDef>& classes) {
  for (const auto& c : classes) {
    if (IsVoidName(c.name)) return c.id;
  }
  return std::nullopt;
}

struct RawMappingRow {
  std::size_t line;
  ClassId source;
  std::string source_name;
  ClassId target;
};

std::vector<RawMappingRow> ReadMappingRows(std::string_view text) {
  std::vector<RawMappingRow> out;
  for (auto& row : csv::ReadTable(text, kMappingHeader)) {
    if (row.fields.size() != 4) {
      throw ParseError("expected 4 fields, got " + std::to_string(row.fields.size()),
                       row.line);
    }
    out.push_back(RawMappingRow{row.line, ParseId(row.fields[0], row.line, "source_id"),
                                Trim(row.fields[1]),
                                ParseId(row.fields[2], row.line, "target_id")});
  }
  return out;
}

MappingTable ValidatedTable(const std::vector<RawMappingRow>& rows,
                            const LabelSpace& source, const LabelSpace& target) {
  std::vector<std::string> problems;
  std::set<ClassId> seen;
  std::vector<MappingEntry> entries;
  for (const auto& r : rows) {
    if (!source.contains(r.source)) {
      problems.push_back("line " + std::to_string(r.line) + ": unknown source id " +
                         std::to_string(r.source) + " in space '" + source.name() + "'");
    }
    if (!target.contains(r.target)) {
      problems.push_back("line " + std::to_string(r.line) + ": unknown target id " +
                         std::to_string(r.target) + " in space '" + target.name() + "'");
    }
    if (!seen.insert(r.source).second) {
      problems.push_back("line " + std::to_string(r.line) + ": source id " +
                         std::to_string(r.source) + " mapped twice");
    }
    entries.push_back(MappingEntry{r.source, r.target});
  }
  if (!problems.empty()) {
    throw ValidationError("mapping '" + source.name() + "' -> '" + target.name() +
                              "' is invalid",
                          std::move(problems));
  }
  return make_mapping(source, target, std::move(entries));
}

}  // namespace

LabelSpace::LabelSpace(std::string name, std::vector<ClassDef> classes,
                       std::optional<ClassId> void_id)
    : name_(std::move(name)), classes_(std::move(classes)), void_id_(void_id) {
  if (classes_.empty()) {
    throw ValidationError("label space '" + name_ + "' has no classes", {});
  }
  ClassId max_id = 0;
  for (const auto& c : classes_) max_id = std::max(max_id, c.id);
  index_.assign(static_cast<std::size_t>(max_id) + 1, -1);

  std::vector<std::string> problems;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.name.empty()) problems.push_back("class " + std::to_string(c.id) + " has an empty name");
    if (index_[c.id] >= 0) {
      problems.push_back("duplicate class id " + std::to_string(c.id));
      continue;
    }
    index_[c.id] = static_cast<std::int32_t>(i);
  }
  if (void_id_ && !contains(*void_id_)) {
    problems.push_back("void id " + std::to_string(*void_id_) + " is not a class");
  }
  if (!problems.empty()) {
    throw ValidationError("label space '" + name_ + "' is invalid", std::move(problems));
  }
}

const ClassDef* LabelSpace::find(ClassId id) const {
  return contains(id) ? &classes_[static_cast<std::size_t>(index_[id])] : nullptr;
}

LabelSpace parse_label_space(std::string_view text, std::string name) {
  std::vector<ClassDef> classes;
  std::map<ClassId, std::size_t> first_line;
  for (auto& row : csv::ReadTable(text, kSpaceHeader)) {
    if (row.fields.size() != 2) {
      throw ParseError("expected 2 fields, got " + std::to_string(row.fields.size()),
                       row.line);
    }
    const ClassId id = ParseId(row.fields[0], row.line, "id");
    std::string class_name = Trim(row.fields[1]);
    if (class_name.empty()) throw ParseError("empty class name", row.line);
    if (auto [it, fresh] = first_line.emplace(id, row.line); !fresh) {
      throw ParseError("duplicate class id " + std::to_string(id) +
                           " (first defined on line " + std::to_string(it->second) + ")",
                       row.line);
    }
    classes.push_back(ClassDef{id, std::move(class_name)});
  }
  if (classes.empty()) throw ParseError("label space '" + name + "' has no classes");
  auto void_id = DetectVoid(classes);
  return LabelSpace(std::move(name), std::move(classes), void_id);
}

std::string format_label_space(const LabelSpace& space) {
  std::string out = "id,name\n";
  for (const auto& c : space.classes()) {
    out += std::to_string(c.id) + "," + csv::Escape(c.name) + "\n";
  }
  return out;
}

LabelSpace generic_unified_space() {
  std::vector<ClassDef> classes;
  classes.reserve(kUnifiedClassCount);
  classes.push_back(ClassDef{kUnifiedVoid, "unlabeled"});
  for (ClassId id = 1; id < kUnifiedClassCount; ++id) {
    std::string n = std::to_string(id);
    classes.push_back(ClassDef{id, "unified_" + std::string(3 - n.size(), '0') + n});
  }
  return LabelSpace("unified", std::move(classes), kUnifiedVoid);
}

LabelSpace infer_source_space(std::string_view mapping_text, std::string name) {
  std::map<ClassId, std::pair<std::string, std::size_t>> names;
  for (const auto& r : ReadMappingRows(mapping_text)) {
    if (r.source_name.empty()) throw ParseError("empty source_name", r.line);
    auto [it, fresh] = names.emplace(r.source, std::make_pair(r.source_name, r.line));
    if (!fresh && it->second.first != r.source_name) {
      throw ParseError("source id " + std::to_string(r.source) + " named '" +
                           r.source_name + "' but '" + it->second.first +
                           "' on line " + std::to_string(it->second.second),
                       r.line);
    }
  }
  if (names.empty()) throw ParseError("mapping for '" + name + "' has no rows");
  std::vector<ClassDef> classes;
  for (auto& [id, entry] : names) classes.push_back(ClassDef{id, entry.first});
  auto void_id = DetectVoid(classes);
  return LabelSpace(std::move(name), std::move(classes), void_id);
}

std::optional<ClassId> MappingTable::lookup(ClassId source_id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), source_id,
                             [](const MappingEntry& e, ClassId s) { return e.source < s; });
  if (it == entries.end() || it->source != source_id) return std::nullopt;
  return it->target;
}

MappingTable make_mapping(const LabelSpace& source, const LabelSpace& target,
                          std::vector<MappingEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const MappingEntry& a, const MappingEntry& b) { return a.source < b.source; });
  std::vector<std::string> dups;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].source == entries[i - 1].source) {
      dups.push_back("source id " + std::to_string(entries[i].source) + " mapped twice");
    }
  }
  if (!dups.empty()) throw ValidationError("mapping is not a function", std::move(dups));

  MappingTable t;
  t.source = source.name();
  t.target = target.name();
  t.source_extent = source.extent();
  t.target_extent = target.extent();
  t.source_void = source.void_id();
  t.target_void = target.void_id();
  t.entries = std::move(entries);
  return t;
}

MappingTable parse_mapping(std::string_view text, const LabelSpace& source,
                           const LabelSpace& target) {
  return ValidatedTable(ReadMappingRows(text), source, target);
}

MappingTable apply_overlay(const MappingTable& base, std::string_view overlay_text,
                           const LabelSpace& source, const LabelSpace& target) {
  const MappingTable overlay = parse_mapping(overlay_text, source, target);
  std::map<ClassId, ClassId> merged;
  for (const auto& e : base.entries) merged[e.source] = e.target;
  for (const auto& e : overlay.entries) merged[e.source] = e.target;
  std::vector<MappingEntry> entries;
  for (const auto& [s, t] : merged) entries.push_back(MappingEntry{s, t});
  return make_mapping(source, target, std::move(entries));
}

std::string format_mapping(const MappingTable& table, const LabelSpace& source,
                           const LabelSpace& target) {
  std::string out = "source_id,source_name,target_id,target_name\n";
  for (const auto& e : table.entries) {
    const ClassDef* s = source.find(e.source);
    const ClassDef* t = target.find(e.target);
    out += std::to_string(e.source) + "," + csv::Escape(s ? s->name : "?") + "," +
           std::to_string(e.target) + "," + csv::Escape(t ? t->name : "?") + "\n";
  }
  return out;
}

std::size_t projected_class_count(const MappingTable& table) {
  std::set<ClassId> targets;
  for (const auto& e : table.entries) {
    if (table.target_void && e.target == *table.target_void) continue;
    targets.insert(e.target);
  }
  return targets.size();
}

MappingReport validate_mapping(const MappingTable& table, const LabelSpace& source,
                               const LabelSpace& target) {
  MappingReport report;
  report.source_class_count = source.size();
  std::map<ClassId, std::vector<ClassId>> preimages;
  std::set<ClassId> mapped;
  for (const auto& e : table.entries) {
    if (!source.contains(e.source)) report.unknown_source_ids.push_back(e.source);
    if (!target.contains(e.target)) report.unknown_target_ids.push_back(e.target);
    mapped.insert(e.source);
    if (target.void_id() && e.target == *target.void_id()) continue;
    preimages[e.target].push_back(e.source);
  }
  report.ok = report.unknown_source_ids.empty() && report.unknown_target_ids.empty();
  report.distinct_targets = preimages.size();
  for (const auto& c : source.classes()) {
    if (!mapped.count(c.id)) report.unmapped_sources.push_back(c.id);
  }
  std::sort(report.unmapped_sources.begin(), report.unmapped_sources.end());
  for (auto& [t, sources] : preimages) {
    if (sources.size() >= 2) {
      std::sort(sources.begin(), sources.end());
      report.collisions.push_back(CollisionGroup{t, sources});
    }
  }
  return report;
}

std::optional<InversionPolicy> parse_inversion_policy(std::string_view name) {
  if (name == "strict") return InversionPolicy::kStrict;
  if (name == "first-listed") return InversionPolicy::kFirstListed;
  if (name == "to-void") return InversionPolicy::kToVoid;
  return std::nullopt;
}

MappingTable invert_mapping(const MappingTable& table, InversionPolicy policy) {
  // entries are sorted by source, so each preimage list is ascending.
  std::map<ClassId, std::vector<ClassId>> preimages;
  for (const auto& e : table.entries) preimages[e.target].push_back(e.source);

  MappingTable inv;
  inv.source = table.target;
  inv.target = table.source;
  inv.source_extent = table.target_extent;
  inv.target_extent = table.source_extent;
  inv.source_void = table.target_void;
  inv.target_void = table.source_void;

  std::vector<ClassId> colliding;
  for (const auto& [unified, sources] : preimages) {
    if (table.target_void && unified == *table.target_void && table.source_void) {
      inv.entries.push_back(MappingEntry{unified, *table.source_void});
      continue;
    }
    if (sources.size() == 1) {
      inv.entries.push_back(MappingEntry{unified, sources.front()});
      continue;
    }
    switch (policy) {
      case InversionPolicy::kStrict:
        colliding.push_back(unified);
        break;
      case InversionPolicy::kFirstListed:
        inv.entries.push_back(MappingEntry{unified, sources.front()});
        break;
      case InversionPolicy::kToVoid:
        if (table.source_void) inv.entries.push_back(MappingEntry{unified, *table.source_void});
        break;
    }
  }
  if (!colliding.empty()) {
    std::string ids;
    for (ClassId c : colliding) ids += (ids.empty() ? "" : ", ") + std::to_string(c);
    throw InversionError("mapping '" + table.source + "' -> '" + table.target +
                             "' is not invertible; colliding ids: " + ids,
                         std::move(colliding));
  }
  return inv;
}

ProjectionLUT build_lut(const MappingTable& table) {
  ProjectionLUT lut;
  lut.source = table.source;
  lut.target = table.target;
  lut.source_void = table.source_void;
  std::size_t extent = table.source_extent;
  for (const auto& e : table.entries) {
    extent = std::max(extent, static_cast<std::size_t>(e.source) + 1);
  }
  lut.table.assign(extent, ProjectionLUT::kVoid);
  for (const auto& e : table.entries) lut.table[e.source] = e.target;
  return lut;
}

void validate_mask(const MaskImage& mask, const LabelSpace& space) {
  std::array<bool, 256> valid{};
  for (std::size_t v = 0; v < valid.size(); ++v) {
    valid[v] = space.contains(static_cast<ClassId>(v));
  }
  if (space.void_id() && *space.void_id() < 256) valid[*space.void_id()] = true;
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (!valid[mask.data[i]]) {
      const auto w = static_cast<std::size_t>(mask.width);
      throw DataError("pixel (" + std::to_string(i % w) + ", " + std::to_string(i / w) +
                      ") has value " + std::to_string(mask.data[i]) +
                      " which is not a class of '" + space.name() + "'");
    }
  }
}

MaskImage project_mask(const MaskImage& mask, const ProjectionLUT& lut,
                       const LabelSpace& target) {
  if (!mask.space.empty() && !lut.source.empty() && mask.space != lut.source) {
    throw ArgumentError("mask is in space '" + mask.space + "' but the table projects from '" +
                        lut.source + "'");
  }
  if (mask.data.size() !=
      static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height)) {
    throw ArgumentError("mask data length does not match its dimensions");
  }

  // Resolve the whole 8-bit domain once; the per-pixel loop is a single load.
  std::array<std::uint8_t, 256> remap{};
  std::array<std::uint8_t, 256> bad{};  // 1: out of table, 2: void without target void
  const auto target_void = target.void_id();
  for (std::size_t v = 0; v < 256; ++v) {
    std::uint32_t out = ProjectionLUT::kVoid;
    if (v < lut.table.size()) {
      out = lut.table[v];
    } else if (!(lut.source_void && *lut.source_void == v)) {
      bad[v] = 1;
      continue;
    }
    if (out == ProjectionLUT::kVoid) {
      if (!target_void || *target_void > 255) {
        bad[v] = 2;
        continue;
      }
      out = *target_void;
    }
    if (out > 255) {
      bad[v] = 3;
      continue;
    }
    remap[v] = static_cast<std::uint8_t>(out);
  }

  MaskImage result;
  result.width = mask.width;
  result.height = mask.height;
  result.space = target.name();
  result.data.resize(mask.data.size());

  const std::uint8_t* in = mask.data.data();
  std::uint8_t* out = result.data.data();
  const std::size_t n = mask.data.size();
  std::uint8_t any_bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t v = in[i];
    out[i] = remap[v];
    any_bad |= bad[v];
  }
  if (any_bad) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!bad[in[i]]) continue;
      const auto w = static_cast<std::size_t>(mask.width);
      const std::string where = "pixel (" + std::to_string(i % w) + ", " +
                                std::to_string(i / w) + ") value " + std::to_string(in[i]);
      switch (bad[in[i]]) {
        case 1:
          throw DataError(where + " is outside the projection table (size " +
                          std::to_string(lut.table.size()) + ")");
        case 2:
          throw DataError(where + " projects to void but '" + target.name() +
                          "' has no 8-bit void class");
        default:
          throw DataError(where + " projects to a class id above 255");
      }
    }
  }
  return result;
}

}  // namespace segkit
