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

#ifndef VSENTINEL_DIFF_H_
#define VSENTINEL_DIFF_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsentinel/entity.h"

namespace vsentinel {

// Maps property ids to Wikibase datatypes. Text format, one entry per line:
//   P569 time
//   P213 external-id
// '#' starts a comment; an optional "@schema <version>" line pins the feature
// schema the registry was written for.
class PropertyRegistry {
 public:
  static PropertyRegistry Parse(std::string_view text);
  static PropertyRegistry Load(const std::filesystem::path& path);

  void Set(const std::string& property, const std::string& datatype);
  // "unknown" for unregistered properties.
  std::string_view Datatype(const std::string& property) const;
  bool IsExternalId(const std::string& property) const;

  const std::string& schema_version() const { return schema_version_; }
  size_t size() const { return datatypes_.size(); }

 private:
  std::map<std::string, std::string> datatypes_;
  std::string schema_version_;
};

struct SectionCounts {
  int64_t added = 0;
  int64_t removed = 0;
  int64_t changed = 0;  // always 0 for aliases/badges/qualifiers/references
  int64_t current = 0;

  bool operator==(const SectionCounts&) const = default;
};

struct EntityDiff {
  SectionCounts sitelinks;
  SectionCounts labels;
  SectionCounts descriptions;
  SectionCounts statements;
  SectionCounts aliases;
  SectionCounts badges;
  SectionCounts qualifiers;
  SectionCounts references;
  int64_t changed_identifiers = 0;
  std::set<std::string> changed_properties;
  // Languages whose label was added, removed or changed.
  std::set<std::string> changed_label_languages;

  // Q-id occurrences in statement values (main, qualifier, reference snaks):
  // everything in added statements, the per-pair multiset surplus in changed
  // statements.
  int64_t added_item_refs = 0;
  int64_t removed_item_refs = 0;
  std::vector<std::string> added_item_ids;  // sorted; size == added_item_refs
  int64_t parent_item_refs = 0;

  int64_t added_urls = 0;
  int64_t removed_urls = 0;
  int64_t parent_urls = 0;

  bool is_creation = false;

  bool operator==(const EntityDiff&) const = default;
};

// Structured difference between two revisions of one item. A null parent is an
// item creation. Throws Error(kItemMismatch) when the item ids differ.
//
// Statements are matched per property: exact structural matches are
// unchanged; the remaining parent-only and child-only statements are paired
// greedily, first by equal main value and then in canonical order, and each
// pair counts as one changed statement.
EntityDiff Diff(const EntityRevision* parent, const EntityRevision& child,
                const PropertyRegistry& registry);

}  // namespace vsentinel

#endif  // VSENTINEL_DIFF_H_
