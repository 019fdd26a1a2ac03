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

#include "vsentinel/diff.h"

#include <algorithm>
#include <sstream>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

PropertyRegistry PropertyRegistry::Parse(std::string_view text) {
  PropertyRegistry registry;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first, second, extra;
    if (!(fields >> first)) continue;
    if (!(fields >> second) || (fields >> extra)) {
      throw Error(ErrorCode::kConfig, "expected '<property> <datatype>'",
                  "line " + std::to_string(line_no));
    }
    if (first == "@schema") {
      registry.schema_version_ = second;
      continue;
    }
    if (!IsPropertyId(first)) {
      throw Error(ErrorCode::kConfig, "invalid property id '" + first + "'",
                  "line " + std::to_string(line_no));
    }
    registry.datatypes_[first] = second;
  }
  return registry;
}

PropertyRegistry PropertyRegistry::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

void PropertyRegistry::Set(const std::string& property,
                           const std::string& datatype) {
  datatypes_[property] = datatype;
}

std::string_view PropertyRegistry::Datatype(const std::string& property) const {
  auto it = datatypes_.find(property);
  return it == datatypes_.end() ? std::string_view("unknown")
                                : std::string_view(it->second);
}

bool PropertyRegistry::IsExternalId(const std::string& property) const {
  return Datatype(property) == "external-id";
}

namespace {

// Multiset difference sizes of two sorted ranges.
template <typename T>
std::pair<int64_t, int64_t> MultisetDelta(std::vector<T> child,
                                          std::vector<T> parent) {
  std::sort(child.begin(), child.end());
  std::sort(parent.begin(), parent.end());
  std::vector<T> only_child, only_parent;
  std::set_difference(child.begin(), child.end(), parent.begin(), parent.end(),
                      std::back_inserter(only_child));
  std::set_difference(parent.begin(), parent.end(), child.begin(), child.end(),
                      std::back_inserter(only_parent));
  return {static_cast<int64_t>(only_child.size()),
          static_cast<int64_t>(only_parent.size())};
}

template <typename Map, typename Equal>
SectionCounts KeyedDelta(const Map& parent, const Map& child, Equal equal,
                         std::set<std::string>* touched = nullptr) {
  SectionCounts counts;
  counts.current = static_cast<int64_t>(child.size());
  for (const auto& [key, value] : child) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      ++counts.added;
      if (touched) touched->insert(key);
    } else if (!equal(it->second, value)) {
      ++counts.changed;
      if (touched) touched->insert(key);
    }
  }
  for (const auto& [key, _] : parent) {
    if (!child.contains(key)) {
      ++counts.removed;
      if (touched) touched->insert(key);
    }
  }
  return counts;
}

struct KeyedStatement {
  std::string key;
  std::string value_key;
  const Statement* statement;
};

std::vector<KeyedStatement> KeyStatements(const std::vector<Statement>* list) {
  std::vector<KeyedStatement> out;
  if (list == nullptr) return out;
  for (const Statement& st : *list) {
    out.push_back({CanonicalKey(st), CanonicalKey(st.value), &st});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

// Removes exact matches, leaving the unmatched statements on each side in
// canonical order.
void CancelExactMatches(std::vector<KeyedStatement>& parent,
                        std::vector<KeyedStatement>& child) {
  std::vector<KeyedStatement> p_rest, c_rest;
  size_t i = 0, j = 0;
  while (i < parent.size() && j < child.size()) {
    if (parent[i].key == child[j].key) {
      ++i;
      ++j;
    } else if (parent[i].key < child[j].key) {
      p_rest.push_back(parent[i++]);
    } else {
      c_rest.push_back(child[j++]);
    }
  }
  p_rest.insert(p_rest.end(), parent.begin() + i, parent.end());
  c_rest.insert(c_rest.end(), child.begin() + j, child.end());
  parent = std::move(p_rest);
  child = std::move(c_rest);
}

void AccumulateSnakCounts(const Statement& st, std::vector<std::string>& qualifiers,
                          std::vector<std::string>& references) {
  for (const Snak& q : st.qualifiers) qualifiers.push_back(CanonicalKey(q));
  for (const ReferenceGroup& g : st.references) references.push_back(CanonicalKey(g));
}

std::vector<std::string> UrlValues(const Statement& st) {
  std::vector<std::string> urls;
  auto take = [&](const SnakValue& v) {
    if (v.kind == SnakKind::kUrl) urls.push_back(v.text);
  };
  take(st.value);
  for (const Snak& q : st.qualifiers) take(q.value);
  for (const ReferenceGroup& g : st.references) {
    for (const Snak& s : g) take(s.value);
  }
  return urls;
}

}  // namespace

EntityDiff Diff(const EntityRevision* parent, const EntityRevision& child,
                const PropertyRegistry& registry) {
  static const EntityRevision kEmpty;
  if (parent != nullptr && parent->item_id != child.item_id) {
    throw Error(ErrorCode::kItemMismatch,
                parent->item_id + " vs " + child.item_id);
  }
  EntityDiff diff;
  diff.is_creation = parent == nullptr;
  const EntityRevision& before = parent ? *parent : kEmpty;

  diff.labels = KeyedDelta(before.labels, child.labels, std::equal_to<>(),
                           &diff.changed_label_languages);
  diff.descriptions =
      KeyedDelta(before.descriptions, child.descriptions, std::equal_to<>());
  diff.sitelinks = KeyedDelta(
      before.sitelinks, child.sitelinks,
      [](const Sitelink& a, const Sitelink& b) { return a.title == b.title; });

  // Aliases and badges: item-global multisets of (key, value) pairs.
  auto alias_pairs = [](const EntityRevision& rev) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [lang, values] : rev.aliases) {
      for (const std::string& v : values) out.emplace_back(lang, v);
    }
    return out;
  };
  auto badge_pairs = [](const EntityRevision& rev) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [site, link] : rev.sitelinks) {
      for (const std::string& b : link.badges) out.emplace_back(site, b);
    }
    return out;
  };
  {
    auto child_aliases = alias_pairs(child);
    diff.aliases.current = static_cast<int64_t>(child_aliases.size());
    std::tie(diff.aliases.added, diff.aliases.removed) =
        MultisetDelta(std::move(child_aliases), alias_pairs(before));
    auto child_badges = badge_pairs(child);
    diff.badges.current = static_cast<int64_t>(child_badges.size());
    std::tie(diff.badges.added, diff.badges.removed) =
        MultisetDelta(std::move(child_badges), badge_pairs(before));
  }

  std::vector<std::string> parent_qualifiers, parent_references;
  std::vector<std::string> child_qualifiers, child_references;

  std::set<std::string> properties;
  for (const auto& [pid, list] : before.statements) {
    properties.insert(pid);
    for (const Statement& st : list) {
      AccumulateSnakCounts(st, parent_qualifiers, parent_references);
      diff.parent_item_refs += static_cast<int64_t>(ReferencedItemIds(st).size());
      diff.parent_urls += UrlSnakCount(st);
    }
  }
  for (const auto& [pid, list] : child.statements) {
    properties.insert(pid);
    diff.statements.current += static_cast<int64_t>(list.size());
    for (const Statement& st : list) {
      AccumulateSnakCounts(st, child_qualifiers, child_references);
    }
  }

  for (const std::string& pid : properties) {
    auto p_it = before.statements.find(pid);
    auto c_it = child.statements.find(pid);
    auto p_list = KeyStatements(p_it == before.statements.end() ? nullptr : &p_it->second);
    auto c_list = KeyStatements(c_it == child.statements.end() ? nullptr : &c_it->second);
    CancelExactMatches(p_list, c_list);
    if (p_list.empty() && c_list.empty()) continue;

    // Pair by equal main value first, then by property alone.
    std::vector<std::pair<const Statement*, const Statement*>> pairs;
    std::vector<bool> p_used(p_list.size(), false), c_used(c_list.size(), false);
    for (size_t c = 0; c < c_list.size(); ++c) {
      for (size_t p = 0; p < p_list.size(); ++p) {
        if (!p_used[p] && p_list[p].value_key == c_list[c].value_key) {
          p_used[p] = c_used[c] = true;
          pairs.emplace_back(p_list[p].statement, c_list[c].statement);
          break;
        }
      }
    }
    size_t p_next = 0;
    for (size_t c = 0; c < c_list.size(); ++c) {
      if (c_used[c]) continue;
      while (p_next < p_list.size() && p_used[p_next]) ++p_next;
      if (p_next == p_list.size()) break;
      p_used[p_next] = c_used[c] = true;
      pairs.emplace_back(p_list[p_next].statement, c_list[c].statement);
    }

    const int64_t changed = static_cast<int64_t>(pairs.size());
    const int64_t added = static_cast<int64_t>(c_list.size()) - changed;
    const int64_t removed = static_cast<int64_t>(p_list.size()) - changed;
    diff.statements.changed += changed;
    diff.statements.added += added;
    diff.statements.removed += removed;
    diff.changed_properties.insert(pid);
    if (registry.IsExternalId(pid)) diff.changed_identifiers += changed + added + removed;

    for (size_t c = 0; c < c_list.size(); ++c) {
      if (c_used[c]) continue;
      auto ids = ReferencedItemIds(*c_list[c].statement);
      diff.added_item_refs += static_cast<int64_t>(ids.size());
      diff.added_item_ids.insert(diff.added_item_ids.end(), ids.begin(), ids.end());
      diff.added_urls += UrlSnakCount(*c_list[c].statement);
    }
    for (size_t p = 0; p < p_list.size(); ++p) {
      if (p_used[p]) continue;
      diff.removed_item_refs +=
          static_cast<int64_t>(ReferencedItemIds(*p_list[p].statement).size());
      diff.removed_urls += UrlSnakCount(*p_list[p].statement);
    }
    for (const auto& [old_st, new_st] : pairs) {
      auto new_ids = ReferencedItemIds(*new_st);
      auto old_ids = ReferencedItemIds(*old_st);
      std::sort(new_ids.begin(), new_ids.end());
      std::sort(old_ids.begin(), old_ids.end());
      std::vector<std::string> gained, lost;
      std::set_difference(new_ids.begin(), new_ids.end(), old_ids.begin(),
                          old_ids.end(), std::back_inserter(gained));
      std::set_difference(old_ids.begin(), old_ids.end(), new_ids.begin(),
                          new_ids.end(), std::back_inserter(lost));
      diff.added_item_refs += static_cast<int64_t>(gained.size());
      diff.removed_item_refs += static_cast<int64_t>(lost.size());
      diff.added_item_ids.insert(diff.added_item_ids.end(), gained.begin(), gained.end());
      auto [urls_gained, urls_lost] = MultisetDelta(UrlValues(*new_st), UrlValues(*old_st));
      diff.added_urls += urls_gained;
      diff.removed_urls += urls_lost;
    }
  }
  std::sort(diff.added_item_ids.begin(), diff.added_item_ids.end());

  diff.qualifiers.current = static_cast<int64_t>(child_qualifiers.size());
  std::tie(diff.qualifiers.added, diff.qualifiers.removed) =
      MultisetDelta(std::move(child_qualifiers), std::move(parent_qualifiers));
  diff.references.current = static_cast<int64_t>(child_references.size());
  std::tie(diff.references.added, diff.references.removed) =
      MultisetDelta(std::move(child_references), std::move(parent_references));
  return diff;
}

}  // namespace vsentinel
