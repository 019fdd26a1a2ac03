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

#include "vsentinel/features.h"

#include <algorithm>
#include <cmath>

#include "vsentinel/error.h"

namespace vsentinel {

namespace {

using G = FeatureGroup;

constexpr std::array<FeatureSpec, kFeatureCount> kSchema = {{
    // General metrics.
    {"sitelinks_added", G::kGeneral},
    {"sitelinks_removed", G::kGeneral},
    {"sitelinks_changed", G::kGeneral},
    {"sitelinks_current", G::kGeneral},
    {"labels_added", G::kGeneral},
    {"labels_removed", G::kGeneral},
    {"labels_changed", G::kGeneral},
    {"labels_current", G::kGeneral},
    {"descriptions_added", G::kGeneral},
    {"descriptions_removed", G::kGeneral},
    {"descriptions_changed", G::kGeneral},
    {"descriptions_current", G::kGeneral},
    {"statements_added", G::kGeneral},
    {"statements_removed", G::kGeneral},
    {"statements_changed", G::kGeneral},
    {"statements_current", G::kGeneral},
    {"aliases_added", G::kGeneral},
    {"aliases_removed", G::kGeneral},
    {"aliases_current", G::kGeneral},
    {"badges_added", G::kGeneral},
    {"badges_removed", G::kGeneral},
    {"badges_current", G::kGeneral},
    {"qualifiers_added", G::kGeneral},
    {"qualifiers_removed", G::kGeneral},
    {"qualifiers_current", G::kGeneral},
    {"references_added", G::kGeneral},
    {"references_removed", G::kGeneral},
    {"references_current", G::kGeneral},
    {"identifiers_changed", G::kGeneral},
    // Typical vandalism patterns.
    {"proportion_qids_added", G::kContext},
    {"english_label_changed", G::kContext},
    {"proportion_language_names_added", G::kContext},
    {"proportion_external_links_added", G::kContext},
    {"gender_changed", G::kContext},
    {"citizenship_changed", G::kContext},
    {"sports_team_changed", G::kContext},
    {"dob_changed", G::kContext},
    {"image_changed", G::kContext},
    {"signature_changed", G::kContext},
    {"commons_category_changed", G::kContext},
    {"official_website_changed", G::kContext},
    {"is_human", G::kContext},
    {"is_living_human", G::kContext},
    // Typical non-vandalism patterns.
    {"is_client_edit", G::kType},
    {"is_merge", G::kType},
    {"is_revertish", G::kType},
    {"is_item_creation", G::kType},
    // Editor characteristics.
    {"is_bot", G::kUser},
    {"has_advanced_rights", G::kUser},
    {"is_admin", G::kUser},
    {"is_curator", G::kUser},
    {"is_anonymous", G::kUser},
    {"log_age", G::kUser},
}};

double Flag(bool b) { return b ? 1.0 : 0.0; }

bool Intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.contains(x); });
}

bool HasItemValue(const EntityRevision& rev, const std::string& property,
                  const std::string& item) {
  auto it = rev.statements.find(property);
  if (it == rev.statements.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const Statement& st) {
    return st.value.kind == SnakKind::kItem && st.value.text == item;
  });
}

}  // namespace

const char* FeatureGroupName(FeatureGroup group) {
  switch (group) {
    case G::kGeneral: return "general";
    case G::kContext: return "context";
    case G::kType: return "type";
    case G::kUser: return "user";
  }
  return "general";
}

GroupSet GroupSet::Parse(std::string_view text) {
  if (text == "all") return All();
  GroupSet set;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token == "general") set.Add(G::kGeneral);
    else if (token == "context") set.Add(G::kContext);
    else if (token == "type") set.Add(G::kType);
    else if (token == "user") set.Add(G::kUser);
    else if (token == "all") set = All();
    else throw Error(ErrorCode::kConfig, "unknown feature group '" + std::string(token) + "'");
    start = end + 1;
  }
  if (set.empty()) throw Error(ErrorCode::kConfig, "empty feature group list");
  return set;
}

std::string GroupSet::ToString() const {
  if (*this == All()) return "all";
  std::string out;
  for (G g : {G::kGeneral, G::kContext, G::kType, G::kUser}) {
    if (!Contains(g)) continue;
    if (!out.empty()) out += ',';
    out += FeatureGroupName(g);
  }
  return out;
}

std::span<const FeatureSpec, kFeatureCount> FeatureSchema() { return kSchema; }

std::vector<std::string> FeatureNames(GroupSet groups) {
  std::vector<std::string> names;
  for (const FeatureSpec& spec : kSchema) {
    if (groups.Contains(spec.group)) names.emplace_back(spec.name);
  }
  return names;
}

size_t FeatureIndex(std::string_view name) {
  for (size_t i = 0; i < kSchema.size(); ++i) {
    if (kSchema[i].name == name) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feature '" + std::string(name) + "'");
}

std::vector<size_t> FeatureIndices(GroupSet groups) {
  std::vector<size_t> indices;
  for (size_t i = 0; i < kSchema.size(); ++i) {
    if (groups.Contains(kSchema[i].group)) indices.push_back(i);
  }
  return indices;
}

std::vector<double> SelectGroups(const FeatureVector& v, GroupSet groups) {
  std::vector<double> out;
  for (size_t i : FeatureIndices(groups)) out.push_back(v.values[i]);
  return out;
}

FeatureVector ExtractFeatures(const EntityDiff& diff, const EntityRevision& child,
                              const EditMeta& meta, const PropertyRegistry& registry,
                              const PatternConfig& config) {
  if (config.feature_schema != kFeatureSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch, "pattern config is for '" +
                                                config.feature_schema + "'");
  }
  if (!registry.schema_version().empty() &&
      registry.schema_version() != kFeatureSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch, "property registry is for '" +
                                                registry.schema_version() + "'");
  }
  FeatureVector fv;
  size_t i = 0;
  auto put = [&](double value) { fv.values[i++] = value; };
  auto put4 = [&](const SectionCounts& c) {
    put(c.added);
    put(c.removed);
    put(c.changed);
    put(c.current);
  };
  auto put3 = [&](const SectionCounts& c) {
    put(c.added);
    put(c.removed);
    put(c.current);
  };
  put4(diff.sitelinks);
  put4(diff.labels);
  put4(diff.descriptions);
  put4(diff.statements);
  put3(diff.aliases);
  put3(diff.badges);
  put3(diff.qualifiers);
  put3(diff.references);
  put(diff.changed_identifiers);

  const PropertyBindings& b = config.bindings;
  auto changed = [&](const std::string& pid) {
    return Flag(diff.changed_properties.contains(pid));
  };
  const int64_t language_refs = std::count_if(
      diff.added_item_ids.begin(), diff.added_item_ids.end(),
      [&](const std::string& q) { return config.language_item_ids.contains(q); });
  put(static_cast<double>(diff.added_item_refs - diff.removed_item_refs) /
      static_cast<double>(diff.parent_item_refs + 1));
  put(Flag(diff.changed_label_languages.contains("en")));
  put(static_cast<double>(language_refs) / static_cast<double>(diff.added_item_refs + 1));
  put(static_cast<double>(diff.added_urls) / static_cast<double>(diff.parent_urls + 1));
  put(changed(b.gender));
  put(changed(b.citizenship));
  put(changed(b.sports_team));
  put(changed(b.date_of_birth));
  put(changed(b.image));
  put(changed(b.signature));
  put(changed(b.commons_category));
  put(changed(b.official_website));
  const bool is_human = HasItemValue(child, b.instance_of, b.human);
  put(Flag(is_human));
  put(Flag(is_human && !child.statements.contains(b.date_of_death)));

  const EditKind kind = ClassifyComment(meta.comment, meta, config);
  put(Flag(kind == EditKind::kClient));
  put(Flag(kind == EditKind::kMerge));
  put(Flag(kind == EditKind::kRevertish));
  put(Flag(diff.is_creation));

  const UserInfo& user = meta.user;
  put(Flag(config.IsBot(user)));
  put(Flag(Intersects(user.groups, config.advanced_groups)));
  put(Flag(Intersects(user.groups, config.admin_groups)));
  put(Flag(Intersects(user.groups, config.curator_groups)));
  put(Flag(user.is_anonymous));
  double log_age = 0.0;
  if (!user.is_anonymous && user.registration) {
    const int64_t age = std::max<int64_t>(0, meta.timestamp - *user.registration);
    log_age = std::log(static_cast<double>(age) + 1.0);
  }
  put(log_age);
  return fv;
}

}  // namespace vsentinel
