// Copyright 2026 The vandal-sentinel Authors.
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

#ifndef VSENTINEL_FEATURES_H_
#define VSENTINEL_FEATURES_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsentinel/diff.h"
#include "vsentinel/entity.h"
#include "vsentinel/patterns.h"

namespace vsentinel {

enum class FeatureGroup : uint8_t { kGeneral, kContext, kType, kUser };

const char* FeatureGroupName(FeatureGroup group);

// Small bit set over FeatureGroup.
class GroupSet {
 public:
  constexpr GroupSet() = default;
  constexpr GroupSet(std::initializer_list<FeatureGroup> groups) {
    for (FeatureGroup g : groups) Add(g);
  }
  static constexpr GroupSet All() {
    return {FeatureGroup::kGeneral, FeatureGroup::kContext, FeatureGroup::kType,
            FeatureGroup::kUser};
  }
  // "all" or a comma list such as "general,user".
  static GroupSet Parse(std::string_view text);

  constexpr void Add(FeatureGroup g) { bits_ |= Bit(g); }
  constexpr bool Contains(FeatureGroup g) const { return (bits_ & Bit(g)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  // "general,context" in schema order; "all" for the full set.
  std::string ToString() const;

  constexpr bool operator==(const GroupSet&) const = default;

 private:
  static constexpr uint8_t Bit(FeatureGroup g) {
    return static_cast<uint8_t>(1u << static_cast<unsigned>(g));
  }
  uint8_t bits_ = 0;
};

struct FeatureSpec {
  std::string_view name;
  FeatureGroup group;
};

inline constexpr size_t kFeatureCount = 53;

// The fixed, versioned feature order (kFeatureSchemaVersion).
std::span<const FeatureSpec, kFeatureCount> FeatureSchema();
std::vector<std::string> FeatureNames(GroupSet groups = GroupSet::All());
// Index into the full vector; throws Error(kInvalidArgument) for unknown names.
size_t FeatureIndex(std::string_view name);

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](size_t i) const { return values[i]; }
  double Get(std::string_view name) const { return values[FeatureIndex(name)]; }
  bool operator==(const FeatureVector&) const = default;
};

// Reads only the parent/child diff, the child snapshot and the edit metadata.
// Throws Error(kSchemaMismatch) when the config or registry was written for
// another feature schema.
FeatureVector ExtractFeatures(const EntityDiff& diff, const EntityRevision& child,
                              const EditMeta& meta, const PropertyRegistry& registry,
                              const PatternConfig& config);

// Full-vector indices of the requested groups, in schema order.
std::vector<size_t> FeatureIndices(GroupSet groups);
std::vector<double> SelectGroups(const FeatureVector& v, GroupSet groups);

}  // namespace vsentinel

#endif  // VSENTINEL_FEATURES_H_
