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

// Vocabulary the feature extractor and corpus builder are parameterized by:
// property bindings for the vandalism-pattern flags, user-group sets, the
// language item list, and the ordered edit-summary classification table.

#ifndef VSENTINEL_PATTERNS_H_
#define VSENTINEL_PATTERNS_H_

#include <filesystem>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsentinel/entity.h"

namespace vsentinel {

inline constexpr std::string_view kFeatureSchemaVersion = "vs-features/1";

enum class EditKind { kClient, kMerge, kRevertish, kRegular, kCreation };

const char* EditKindName(EditKind kind);
EditKind ParseEditKind(std::string_view name);

struct CommentRule {
  EditKind kind;
  std::string pattern;
  std::regex regex;
};

struct PropertyBindings {
  std::string gender = "P21";
  std::string citizenship = "P27";
  std::string sports_team = "P54";
  std::string date_of_birth = "P569";
  std::string image = "P18";
  std::string signature = "P109";
  std::string commons_category = "P373";
  std::string official_website = "P856";
  std::string instance_of = "P31";
  std::string date_of_death = "P570";
  std::string human = "Q5";
};

struct PatternConfig {
  std::string feature_schema = std::string(kFeatureSchemaVersion);
  PropertyBindings bindings;
  std::set<std::string> trusted_groups;
  std::set<std::string> advanced_groups;
  std::set<std::string> curator_groups;
  std::set<std::string> admin_groups;
  std::set<std::string> bot_groups;
  std::set<std::string> language_item_ids;
  std::vector<CommentRule> comment_rules;  // first match wins

  static PatternConfig Defaults();
  // "key = value" lines applied on top of Defaults(). Any comment.* line
  // replaces the whole default comment table, in file order.
  static PatternConfig Parse(std::string_view text);
  static PatternConfig Load(const std::filesystem::path& path);
  std::string ToText() const;

  void AddCommentRule(EditKind kind, const std::string& pattern);
  bool IsTrusted(const UserInfo& user) const;
  bool IsBot(const UserInfo& user) const;
};

// Classifies an edit by its MediaWiki auto-summary. Creation is also inferred
// from a zero parent revision when no rule matches.
EditKind ClassifyComment(std::string_view comment, const EditMeta& meta,
                         const PatternConfig& config);

}  // namespace vsentinel

#endif  // VSENTINEL_PATTERNS_H_
