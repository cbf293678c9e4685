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

// Label spaces, dataset<->unified mappings and mask projection.
//
// A LabelSpace is an ordered set of classes parsed from an `id,name` CSV. A
// MappingTable is a partial, possibly many-to-one function between two spaces
// parsed from a `source_id,source_name,target_id,target_name` CSV. Masks are
// projected through a dense ProjectionLUT built from the table.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segkit {

using ClassId = std::uint32_t;

/// Number of classes in the unified label space. Class 0 is the unlabeled
/// (void) class.
inline constexpr std::size_t kUnifiedClassCount = 256;
inline constexpr ClassId kUnifiedVoid = 0;

struct ClassDef {
  ClassId id = 0;
  std::string name;

  bool operator==(const ClassDef&) const = default;
};

class LabelSpace {
 public:
  /// Throws ValidationError if ids repeat, a name is empty, the space is empty
  /// or `void_id` is not a member.
  LabelSpace(std::string name, std::vector<ClassDef> classes,
             std::optional<ClassId> void_id = std::nullopt);

  const std::string& name() const { return name_; }
  std::span<const ClassDef> classes() const { return classes_; }
  std::optional<ClassId> void_id() const { return void_id_; }
  std::size_t size() const { return classes_.size(); }
  ClassId max_id() const { return static_cast<ClassId>(index_.size() - 1); }
  /// max_id() + 1; the length of any dense per-id table over this space.
  std::size_t extent() const { return index_.size(); }

  bool contains(ClassId id) const {
    return id < index_.size() && index_[id] >= 0;
  }
  /// nullptr when `id` is not a member.
  const ClassDef* find(ClassId id) const;

 private:
  std::string name_;
  std::vector<ClassDef> classes_;
  std::optional<ClassId> void_id_;
  std::vector<std::int32_t> index_;  // id -> position in classes_, -1 if absent
};

/// Parses an `id,name` CSV. A class named void, unlabeled, unlabelled or
/// ignore (any case) becomes the void class; the first one wins.
LabelSpace parse_label_space(std::string_view text, std::string name);

/// Serializes back to the `id,name` CSV form.
std::string format_label_space(const LabelSpace& space);

/// Generic 256-class unified space used when no devkit file is supplied:
/// class 0 "unlabeled" (void), classes 1..255 "unified_NNN".
LabelSpace generic_unified_space();

/// Builds the source space implied by the source columns of a mapping CSV.
/// Rows repeating a source id must agree on the name.
LabelSpace infer_source_space(std::string_view mapping_text, std::string name);

struct MappingEntry {
  ClassId source = 0;
  ClassId target = 0;

  bool operator==(const MappingEntry&) const = default;
};

struct MappingTable {
  std::string source;
  std::string target;
  std::size_t source_extent = 0;  // LabelSpace::extent() of the source space
  std::size_t target_extent = 0;
  std::optional<ClassId> source_void;
  std::optional<ClassId> target_void;
  std::vector<MappingEntry> entries;  // sorted by source id, sources unique

  std::optional<ClassId> lookup(ClassId source_id) const;
};

/// Builds a table without checking ids against the spaces (see
/// validate_mapping). Entries are sorted; a repeated source id throws
/// ValidationError.
MappingTable make_mapping(const LabelSpace& source, const LabelSpace& target,
                          std::vector<MappingEntry> entries);

/// Parses a mapping CSV. Names are advisory and ignored; ids must be members
/// of their spaces, otherwise ValidationError lists every offending row.
MappingTable parse_mapping(std::string_view text, const LabelSpace& source,
                           const LabelSpace& target);

/// Applies a correction overlay (same CSV format) entry-wise: overlay rows
/// replace the base entry for their source id or add a new one.
MappingTable apply_overlay(const MappingTable& base, std::string_view overlay_text,
                           const LabelSpace& source, const LabelSpace& target);

std::string format_mapping(const MappingTable& table, const LabelSpace& source,
                           const LabelSpace& target);

/// Number of distinct targets, not counting the target void class.
std::size_t projected_class_count(const MappingTable& table);

struct CollisionGroup {
  ClassId target = 0;
  std::vector<ClassId> sources;  // ascending, size >= 2
};

struct MappingReport {
  bool ok = true;  // no unknown ids
  std::size_t source_class_count = 0;
  std::size_t distinct_targets = 0;  // excluding target void
  std::vector<ClassId> unknown_source_ids;
  std::vector<ClassId> unknown_target_ids;
  std::vector<ClassId> unmapped_sources;
  std::vector<CollisionGroup> collisions;  // groups over non-void targets
};

MappingReport validate_mapping(const MappingTable& table, const LabelSpace& source,
                               const LabelSpace& target);

enum class InversionPolicy {
  kStrict,       // any collision is an InversionError
  kFirstListed,  // the lowest source id wins
  kToVoid,       // colliding ids go to the source void class
};

std::optional<InversionPolicy> parse_inversion_policy(std::string_view name);

/// Inverts a dataset->unified table into unified->dataset. Ids with no
/// preimage get no entry; projecting through the inverse sends them to the
/// dataset's void class. The unified void maps to the dataset void directly
/// when the dataset has one and never counts as a collision.
MappingTable invert_mapping(const MappingTable& table,
                            InversionPolicy policy = InversionPolicy::kFirstListed);

/// Dense realization of a MappingTable.
struct ProjectionLUT {
  static constexpr std::uint32_t kVoid = 0xFFFFFFFFu;

  std::string source;
  std::string target;
  std::optional<ClassId> source_void;
  std::vector<std::uint32_t> table;  // length = source extent

  std::size_t size() const { return table.size(); }
};

/// Table length comes from the source space extent, so an empty mapping gives
/// an all-kVoid table.
ProjectionLUT build_lut(const MappingTable& table);

struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, one class id per pixel
  std::string space;

  MaskImage() = default;
  MaskImage(int w, int h, std::string space_name, std::uint8_t fill = 0)
      : width(w),
        height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill),
        space(std::move(space_name)) {}

  std::size_t pixel_count() const { return data.size(); }
  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

/// Throws DataError naming the first pixel that is neither a class of
/// `space` nor its void id.
void validate_mask(const MaskImage& mask, const LabelSpace& space);

/// out[p] = lut[in[p]]. kVoid cells and source-void pixels outside the table
/// become target.void_id(). Throws DataError with the pixel coordinate for
/// values outside the table, or when a void result has no target void class.
MaskImage project_mask(const MaskImage& mask, const ProjectionLUT& lut,
                       const LabelSpace& target);

}  // namespace segkit
