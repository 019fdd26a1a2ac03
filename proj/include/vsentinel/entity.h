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

// Wikibase item model: the five content sections of an item (labels,
// descriptions, aliases, statements, sitelinks) plus the edit metadata that
// travels with a revision. Parses and writes the public entity JSON shape.

#ifndef VSENTINEL_ENTITY_H_
#define VSENTINEL_ENTITY_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vsentinel/timestamp.h"

namespace vsentinel {

enum class SnakKind {
  kItem,
  kString,
  kQuantity,
  kTime,
  kUrl,
  kExternalId,
  kCoordinate,
  kNoValue,
  kSomeValue,
};

struct SnakValue {
  SnakKind kind = SnakKind::kNoValue;
  // Q-id for kItem, decimal amount for kQuantity, the time string for kTime,
  // the literal for kString/kUrl/kExternalId. Unknown datatypes land here as
  // kString carrying the raw serialized datavalue.
  std::string text;
  double latitude = 0.0;  // kCoordinate only
  double longitude = 0.0;

  static SnakValue Item(std::string qid);
  static SnakValue String(std::string s);
  static SnakValue Url(std::string url);
  static SnakValue ExternalId(std::string id);
  static SnakValue Quantity(std::string amount);
  static SnakValue Time(std::string time);
  static SnakValue Coordinate(double lat, double lon);
  static SnakValue NoValue();
  static SnakValue SomeValue();

  bool operator==(const SnakValue&) const = default;
};

struct Snak {
  std::string property;
  SnakValue value;
  bool operator==(const Snak&) const = default;
};

using ReferenceGroup = std::vector<Snak>;

enum class Rank { kPreferred, kNormal, kDeprecated };

struct Statement {
  std::string property;
  SnakValue value;
  std::vector<Snak> qualifiers;
  std::vector<ReferenceGroup> references;
  Rank rank = Rank::kNormal;

  bool operator==(const Statement&) const = default;
};

struct Sitelink {
  std::string site;
  std::string title;
  std::vector<std::string> badges;

  bool operator==(const Sitelink&) const = default;
};

struct EntityRevision {
  std::string item_id;
  int64_t rev_id = 0;  // filled from edit metadata, not from entity JSON
  UnixSeconds timestamp = 0;
  std::map<std::string, std::string> labels;
  std::map<std::string, std::string> descriptions;
  std::map<std::string, std::vector<std::string>> aliases;
  std::map<std::string, std::vector<Statement>> statements;
  std::map<std::string, Sitelink> sitelinks;

  bool operator==(const EntityRevision&) const = default;
};

struct UserInfo {
  std::string name;
  bool is_anonymous = false;
  bool is_bot = false;
  std::set<std::string> groups;
  std::optional<UnixSeconds> registration;

  bool operator==(const UserInfo&) const = default;
};

struct EditMeta {
  int64_t rev_id = 0;
  int64_t parent_rev_id = 0;  // 0 for item creation
  UserInfo user;
  std::string comment;
  UnixSeconds timestamp = 0;

  bool operator==(const EditMeta&) const = default;
};

// SHA-1 of the canonical content serialization.
struct Digest {
  std::array<uint8_t, 20> bytes{};

  std::string Hex() const;
  auto operator<=>(const Digest&) const = default;
};

bool IsItemId(std::string_view id);
bool IsPropertyId(std::string_view id);
bool IsAbsoluteUrl(std::string_view url);

// Throws Error(kMalformedJson) when the text is not JSON and
// Error(kSchemaViolation) when it does not have the entity shape; both carry
// the path of the offending node.
EntityRevision ParseEntity(std::string_view json_text);
EntityRevision EntityFromJson(const nlohmann::json& doc);

nlohmann::json EntityToJson(const EntityRevision& rev);
std::string SerializeEntity(const EntityRevision& rev);

// Byte string that identifies a snak/statement up to list ordering of its
// qualifiers and references. Structural statement identity is equality of
// these keys.
std::string CanonicalKey(const SnakValue& value);
std::string CanonicalKey(const Snak& snak);
std::string CanonicalKey(const ReferenceGroup& group);
std::string CanonicalKey(const Statement& statement);

// Depends only on the five content sections; invariant under list order of
// statements within a property, aliases, badges, qualifiers and references.
Digest CanonicalHash(const EntityRevision& rev);

// Every Q-id referenced by the statement (main value, qualifiers, references).
std::vector<std::string> ReferencedItemIds(const Statement& statement);
// Number of url-valued snaks in the statement.
int64_t UrlSnakCount(const Statement& statement);

nlohmann::json UserInfoToJson(const UserInfo& user);
UserInfo UserInfoFromJson(const nlohmann::json& doc);
nlohmann::json EditMetaToJson(const EditMeta& meta);
EditMeta EditMetaFromJson(const nlohmann::json& doc);

}  // namespace vsentinel

#endif  // VSENTINEL_ENTITY_H_
