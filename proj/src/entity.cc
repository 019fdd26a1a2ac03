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

#include "vsentinel/entity.h"

#include <openssl/sha.h>

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "vsentinel/error.h"

namespace vsentinel {

using nlohmann::json;

SnakValue SnakValue::Item(std::string qid) {
  return {SnakKind::kItem, std::move(qid)};
}
SnakValue SnakValue::String(std::string s) {
  return {SnakKind::kString, std::move(s)};
}
SnakValue SnakValue::Url(std::string url) {
  return {SnakKind::kUrl, std::move(url)};
}
SnakValue SnakValue::ExternalId(std::string id) {
  return {SnakKind::kExternalId, std::move(id)};
}
SnakValue SnakValue::Quantity(std::string amount) {
  return {SnakKind::kQuantity, std::move(amount)};
}
SnakValue SnakValue::Time(std::string time) {
  return {SnakKind::kTime, std::move(time)};
}
SnakValue SnakValue::Coordinate(double lat, double lon) {
  return {SnakKind::kCoordinate, {}, lat, lon};
}
SnakValue SnakValue::NoValue() { return {SnakKind::kNoValue, {}}; }
SnakValue SnakValue::SomeValue() { return {SnakKind::kSomeValue, {}}; }

std::string Digest::Hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

namespace {

bool IsPrefixedNumber(std::string_view id, char prefix) {
  if (id.size() < 2 || id[0] != prefix || id[1] < '1' || id[1] > '9') {
    return false;
  }
  return std::all_of(id.begin() + 1, id.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void Violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, what, path);
}

std::string JoinPath(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Violation(JoinPath(path, key), "missing required key");
  return *it;
}

void ExpectObject(const json& j, const std::string& path) {
  if (!j.is_object()) Violation(path, "expected an object");
}

void ExpectArray(const json& j, const std::string& path) {
  if (!j.is_array()) Violation(path, "expected a list");
}

const std::string& ExpectString(const json& j, const std::string& path) {
  if (!j.is_string()) Violation(path, "expected a string");
  return j.get_ref<const std::string&>();
}

double ExpectNumber(const json& j, const std::string& path) {
  if (!j.is_number()) Violation(path, "expected a number");
  return j.get<double>();
}

// Wikibase serializes empty maps as [] in some places; accept both.
bool IsEmptyMapLike(const json& j) { return j.is_array() && j.empty(); }

std::string IndexPath(const std::string& base, size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::string ItemIdFromEntityValue(const json& value, const std::string& path) {
  ExpectObject(value, path);
  std::string id;
  if (auto it = value.find("id"); it != value.end()) {
    id = ExpectString(*it, path + ".id");
  } else if (auto num = value.find("numeric-id"); num != value.end()) {
    if (!num->is_number_integer()) Violation(path + ".numeric-id", "expected an integer");
    id = "Q" + std::to_string(num->get<int64_t>());
  } else {
    Violation(path, "entity value without id");
  }
  if (!IsItemId(id)) Violation(path, "invalid item id '" + id + "'");
  return id;
}

SnakValue ParseDataValue(const std::string& datatype, const json& datavalue,
                         const std::string& path) {
  ExpectObject(datavalue, path);
  const json& value = Require(datavalue, "value", path);
  std::string type;
  if (auto it = datavalue.find("type"); it != datavalue.end()) {
    type = ExpectString(*it, path + ".type");
  }
  const std::string value_path = path + ".value";

  if (datatype == "wikibase-item" ||
      (datatype.empty() && type == "wikibase-entityid" && value.is_object() &&
       value.value("entity-type", "item") == "item")) {
    return SnakValue::Item(ItemIdFromEntityValue(value, value_path));
  }
  if (datatype == "url") {
    const std::string& url = ExpectString(value, value_path);
    if (!IsAbsoluteUrl(url)) Violation(value_path, "not an absolute URL");
    return SnakValue::Url(url);
  }
  if (datatype == "external-id") {
    return SnakValue::ExternalId(ExpectString(value, value_path));
  }
  if (datatype == "string" || (datatype.empty() && type == "string")) {
    return SnakValue::String(ExpectString(value, value_path));
  }
  if (datatype == "quantity" || (datatype.empty() && type == "quantity")) {
    ExpectObject(value, value_path);
    return SnakValue::Quantity(ExpectString(
        Require(value, "amount", value_path), value_path + ".amount"));
  }
  if (datatype == "time" || (datatype.empty() && type == "time")) {
    ExpectObject(value, value_path);
    return SnakValue::Time(
        ExpectString(Require(value, "time", value_path), value_path + ".time"));
  }
  if (datatype == "globe-coordinate" ||
      (datatype.empty() && type == "globecoordinate")) {
    ExpectObject(value, value_path);
    return SnakValue::Coordinate(
        ExpectNumber(Require(value, "latitude", value_path), value_path + ".latitude"),
        ExpectNumber(Require(value, "longitude", value_path), value_path + ".longitude"));
  }
  // Unknown datatype: keep the raw value so later revisions compare equal
  // exactly when the raw values do.
  if (value.is_string()) return SnakValue::String(value.get<std::string>());
  return SnakValue::String(value.dump());
}

Snak ParseSnak(const json& j, const std::string& path) {
  ExpectObject(j, path);
  Snak snak;
  snak.property = ExpectString(Require(j, "property", path), path + ".property");
  if (!IsPropertyId(snak.property)) {
    Violation(path + ".property", "invalid property id '" + snak.property + "'");
  }
  std::string snaktype = "value";
  if (auto it = j.find("snaktype"); it != j.end()) {
    snaktype = ExpectString(*it, path + ".snaktype");
  }
  if (snaktype == "novalue") {
    snak.value = SnakValue::NoValue();
  } else if (snaktype == "somevalue") {
    snak.value = SnakValue::SomeValue();
  } else if (snaktype == "value") {
    std::string datatype;
    if (auto it = j.find("datatype"); it != j.end()) {
      datatype = ExpectString(*it, path + ".datatype");
    }
    snak.value = ParseDataValue(datatype, Require(j, "datavalue", path),
                                path + ".datavalue");
  } else {
    Violation(path + ".snaktype", "unknown snaktype '" + snaktype + "'");
  }
  return snak;
}

// {"P1": [snak, ...], ...} with an optional explicit order list.
std::vector<Snak> ParseSnakMap(const json& map, const json* order,
                               const std::string& path) {
  std::vector<Snak> snaks;
  if (IsEmptyMapLike(map)) return snaks;
  ExpectObject(map, path);
  std::vector<std::string> keys;
  if (order != nullptr && order->is_array()) {
    for (const json& k : *order) {
      if (k.is_string() && map.contains(k.get<std::string>())) {
        keys.push_back(k.get<std::string>());
      }
    }
  }
  for (const auto& [key, _] : map.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  for (const std::string& key : keys) {
    const std::string key_path = JoinPath(path, key);
    const json& list = map.at(key);
    ExpectArray(list, key_path);
    for (size_t i = 0; i < list.size(); ++i) {
      Snak snak = ParseSnak(list[i], IndexPath(key_path, i));
      if (snak.property != key) {
        Violation(IndexPath(key_path, i) + ".property",
                  "snak property does not match its key");
      }
      snaks.push_back(std::move(snak));
    }
  }
  return snaks;
}

Rank ParseRank(const json& j, const std::string& path) {
  const std::string& rank = ExpectString(j, path);
  if (rank == "preferred") return Rank::kPreferred;
  if (rank == "normal") return Rank::kNormal;
  if (rank == "deprecated") return Rank::kDeprecated;
  Violation(path, "unknown rank '" + rank + "'");
}

const char* RankName(Rank rank) {
  switch (rank) {
    case Rank::kPreferred: return "preferred";
    case Rank::kNormal: return "normal";
    case Rank::kDeprecated: return "deprecated";
  }
  return "normal";
}

Statement ParseStatement(const json& j, const std::string& key,
                         const std::string& path) {
  ExpectObject(j, path);
  Statement st;
  Snak main = ParseSnak(Require(j, "mainsnak", path), path + ".mainsnak");
  if (main.property != key) {
    Violation(path + ".mainsnak.property",
              "statement property does not match its key");
  }
  st.property = std::move(main.property);
  st.value = std::move(main.value);
  if (auto it = j.find("rank"); it != j.end()) {
    st.rank = ParseRank(*it, path + ".rank");
  }
  if (auto it = j.find("qualifiers"); it != j.end()) {
    auto order = j.find("qualifiers-order");
    st.qualifiers = ParseSnakMap(*it, order == j.end() ? nullptr : &*order,
                                 path + ".qualifiers");
  }
  if (auto it = j.find("references"); it != j.end()) {
    ExpectArray(*it, path + ".references");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string ref_path = IndexPath(path + ".references", i);
      const json& ref = (*it)[i];
      ExpectObject(ref, ref_path);
      auto order = ref.find("snaks-order");
      st.references.push_back(
          ParseSnakMap(Require(ref, "snaks", ref_path),
                       order == ref.end() ? nullptr : &*order,
                       ref_path + ".snaks"));
    }
  }
  return st;
}

std::map<std::string, std::string> ParseTermMap(const json& j,
                                                const std::string& path) {
  std::map<std::string, std::string> out;
  if (IsEmptyMapLike(j)) return out;
  ExpectObject(j, path);
  for (const auto& [lang, term] : j.items()) {
    const std::string term_path = JoinPath(path, lang);
    ExpectObject(term, term_path);
    out[lang] = ExpectString(Require(term, "value", term_path), term_path + ".value");
  }
  return out;
}

json SnakValueToDataValue(const SnakValue& v) {
  switch (v.kind) {
    case SnakKind::kItem: {
      int64_t numeric = std::stoll(v.text.substr(1));
      return {{"value", {{"entity-type", "item"}, {"numeric-id", numeric}, {"id", v.text}}},
              {"type", "wikibase-entityid"}};
    }
    case SnakKind::kString:
    case SnakKind::kUrl:
    case SnakKind::kExternalId:
      return {{"value", v.text}, {"type", "string"}};
    case SnakKind::kQuantity:
      return {{"value", {{"amount", v.text}, {"unit", "1"}}}, {"type", "quantity"}};
    case SnakKind::kTime:
      return {{"value",
               {{"time", v.text},
                {"timezone", 0},
                {"before", 0},
                {"after", 0},
                {"precision", 11},
                {"calendarmodel", "http://www.wikidata.org/entity/Q1985727"}}},
              {"type", "time"}};
    case SnakKind::kCoordinate:
      return {{"value",
               {{"latitude", v.latitude},
                {"longitude", v.longitude},
                {"altitude", nullptr},
                {"globe", "http://www.wikidata.org/entity/Q2"}}},
              {"type", "globecoordinate"}};
    case SnakKind::kNoValue:
    case SnakKind::kSomeValue:
      break;
  }
  return nullptr;
}

const char* DatatypeName(SnakKind kind) {
  switch (kind) {
    case SnakKind::kItem: return "wikibase-item";
    case SnakKind::kString: return "string";
    case SnakKind::kUrl: return "url";
    case SnakKind::kExternalId: return "external-id";
    case SnakKind::kQuantity: return "quantity";
    case SnakKind::kTime: return "time";
    case SnakKind::kCoordinate: return "globe-coordinate";
    case SnakKind::kNoValue:
    case SnakKind::kSomeValue: break;
  }
  return nullptr;
}

json SnakToJson(const Snak& snak) {
  json j;
  if (snak.value.kind == SnakKind::kNoValue) {
    j["snaktype"] = "novalue";
  } else if (snak.value.kind == SnakKind::kSomeValue) {
    j["snaktype"] = "somevalue";
  } else {
    j["snaktype"] = "value";
    j["datatype"] = DatatypeName(snak.value.kind);
    j["datavalue"] = SnakValueToDataValue(snak.value);
  }
  j["property"] = snak.property;
  return j;
}

// Groups snaks by property in order of first appearance.
std::pair<json, json> SnakMapToJson(const std::vector<Snak>& snaks) {
  json map = json::object();
  json order = json::array();
  for (const Snak& snak : snaks) {
    if (!map.contains(snak.property)) {
      map[snak.property] = json::array();
      order.push_back(snak.property);
    }
    map[snak.property].push_back(SnakToJson(snak));
  }
  return {map, order};
}

json StatementToJson(const Statement& st) {
  json j;
  j["mainsnak"] = SnakToJson(Snak{st.property, st.value});
  j["type"] = "statement";
  j["rank"] = RankName(st.rank);
  if (!st.qualifiers.empty()) {
    auto [map, order] = SnakMapToJson(st.qualifiers);
    j["qualifiers"] = std::move(map);
    j["qualifiers-order"] = std::move(order);
  }
  if (!st.references.empty()) {
    json refs = json::array();
    for (const ReferenceGroup& group : st.references) {
      auto [map, order] = SnakMapToJson(group);
      refs.push_back({{"snaks", std::move(map)}, {"snaks-order", std::move(order)}});
    }
    j["references"] = std::move(refs);
  }
  return j;
}

Digest Sha1Digest(const std::string& bytes) {
  Digest d;
  SHA1(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
       d.bytes.data());
  return d;
}

void AppendQuoted(std::string& out, std::string_view text) {
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void AppendList(std::string& out, std::vector<std::string> keys) {
  std::sort(keys.begin(), keys.end());
  out += '[';
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ',';
    out += keys[i];
  }
  out += ']';
}

void AppendValue(std::string& out, const SnakValue& v) {
  auto pair = [&](const char* kind) {
    out += "[\"";
    out += kind;
    out += "\",";
    AppendQuoted(out, v.text);
    out += ']';
  };
  switch (v.kind) {
    case SnakKind::kItem: return pair("item");
    case SnakKind::kString: return pair("string");
    case SnakKind::kUrl: return pair("url");
    case SnakKind::kExternalId: return pair("external-id");
    case SnakKind::kQuantity: return pair("quantity");
    case SnakKind::kTime: return pair("time");
    case SnakKind::kCoordinate: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "[\"coordinate\",%.17g,%.17g]", v.latitude, v.longitude);
      out += buf;
      return;
    }
    case SnakKind::kNoValue: out += "[\"novalue\"]"; return;
    case SnakKind::kSomeValue: out += "[\"somevalue\"]"; return;
  }
}

}  // namespace

bool IsItemId(std::string_view id) { return IsPrefixedNumber(id, 'Q'); }
bool IsPropertyId(std::string_view id) { return IsPrefixedNumber(id, 'P'); }

bool IsAbsoluteUrl(std::string_view url) {
  // scheme "://" host [rest], no whitespace anywhere.
  const size_t sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(url[0]))) return false;
  for (size_t i = 1; i < sep; ++i) {
    const char c = url[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '.' && c != '-') {
      return false;
    }
  }
  size_t host_end = sep + 3;
  while (host_end < url.size() && url[host_end] != '/' && url[host_end] != '?' &&
         url[host_end] != '#') {
    ++host_end;
  }
  if (host_end == sep + 3) return false;
  return std::none_of(url.begin() + static_cast<ptrdiff_t>(sep + 3), url.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
}

EntityRevision EntityFromJson(const json& doc) {
  ExpectObject(doc, "$");
  EntityRevision rev;
  rev.item_id = ExpectString(Require(doc, "id", ""), "id");
  if (!IsItemId(rev.item_id)) Violation("id", "invalid item id '" + rev.item_id + "'");

  if (auto it = doc.find("labels"); it != doc.end()) {
    rev.labels = ParseTermMap(*it, "labels");
  }
  if (auto it = doc.find("descriptions"); it != doc.end()) {
    rev.descriptions = ParseTermMap(*it, "descriptions");
  }
  if (auto it = doc.find("aliases"); it != doc.end() && !IsEmptyMapLike(*it)) {
    ExpectObject(*it, "aliases");
    for (const auto& [lang, list] : it->items()) {
      const std::string lang_path = JoinPath("aliases", lang);
      ExpectArray(list, lang_path);
      std::vector<std::string> values;
      for (size_t i = 0; i < list.size(); ++i) {
        const std::string item_path = IndexPath(lang_path, i);
        ExpectObject(list[i], item_path);
        std::string value =
            ExpectString(Require(list[i], "value", item_path), item_path + ".value");
        if (std::find(values.begin(), values.end(), value) != values.end()) {
          Violation(item_path, "duplicate alias '" + value + "'");
        }
        values.push_back(std::move(value));
      }
      if (!values.empty()) rev.aliases[lang] = std::move(values);
    }
  }
  if (auto it = doc.find("claims"); it != doc.end() && !IsEmptyMapLike(*it)) {
    ExpectObject(*it, "claims");
    for (const auto& [pid, list] : it->items()) {
      const std::string pid_path = JoinPath("claims", pid);
      if (!IsPropertyId(pid)) Violation(pid_path, "invalid property id");
      ExpectArray(list, pid_path);
      std::vector<Statement> statements;
      for (size_t i = 0; i < list.size(); ++i) {
        statements.push_back(ParseStatement(list[i], pid, IndexPath(pid_path, i)));
      }
      if (!statements.empty()) rev.statements[pid] = std::move(statements);
    }
  }
  if (auto it = doc.find("sitelinks"); it != doc.end() && !IsEmptyMapLike(*it)) {
    ExpectObject(*it, "sitelinks");
    for (const auto& [site, link] : it->items()) {
      const std::string site_path = JoinPath("sitelinks", site);
      ExpectObject(link, site_path);
      Sitelink sl;
      sl.site = site;
      if (auto s = link.find("site"); s != link.end() &&
                                      ExpectString(*s, site_path + ".site") != site) {
        Violation(site_path + ".site", "site does not match its key");
      }
      sl.title = ExpectString(Require(link, "title", site_path), site_path + ".title");
      if (auto b = link.find("badges"); b != link.end()) {
        ExpectArray(*b, site_path + ".badges");
        for (size_t i = 0; i < b->size(); ++i) {
          const std::string badge_path = IndexPath(site_path + ".badges", i);
          const std::string& badge = ExpectString((*b)[i], badge_path);
          if (!IsItemId(badge)) Violation(badge_path, "badge is not an item id");
          if (std::find(sl.badges.begin(), sl.badges.end(), badge) != sl.badges.end()) {
            Violation(badge_path, "duplicate badge");
          }
          sl.badges.push_back(badge);
        }
      }
      rev.sitelinks[site] = std::move(sl);
    }
  }
  return rev;
}

EntityRevision ParseEntity(std::string_view json_text) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    // Re-parse to recover the byte offset for the error message.
    try {
      json unused = json::parse(json_text.begin(), json_text.end());
      (void)unused;
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedJson, e.what(),
                  "byte " + std::to_string(e.byte));
    }
    throw Error(ErrorCode::kMalformedJson, "unparseable input", "$");
  }
  return EntityFromJson(doc);
}

json EntityToJson(const EntityRevision& rev) {
  json doc;
  doc["type"] = "item";
  doc["id"] = rev.item_id;
  json labels = json::object();
  for (const auto& [lang, value] : rev.labels) {
    labels[lang] = {{"language", lang}, {"value", value}};
  }
  doc["labels"] = std::move(labels);
  json descriptions = json::object();
  for (const auto& [lang, value] : rev.descriptions) {
    descriptions[lang] = {{"language", lang}, {"value", value}};
  }
  doc["descriptions"] = std::move(descriptions);
  json aliases = json::object();
  for (const auto& [lang, values] : rev.aliases) {
    if (values.empty()) continue;
    json list = json::array();
    for (const std::string& v : values) list.push_back({{"language", lang}, {"value", v}});
    aliases[lang] = std::move(list);
  }
  doc["aliases"] = std::move(aliases);
  json claims = json::object();
  for (const auto& [pid, statements] : rev.statements) {
    if (statements.empty()) continue;
    json list = json::array();
    for (const Statement& st : statements) list.push_back(StatementToJson(st));
    claims[pid] = std::move(list);
  }
  doc["claims"] = std::move(claims);
  json sitelinks = json::object();
  for (const auto& [site, link] : rev.sitelinks) {
    sitelinks[site] = {{"site", site}, {"title", link.title}, {"badges", link.badges}};
  }
  doc["sitelinks"] = std::move(sitelinks);
  return doc;
}

std::string SerializeEntity(const EntityRevision& rev) {
  return EntityToJson(rev).dump();
}

std::string CanonicalKey(const SnakValue& value) {
  std::string out;
  AppendValue(out, value);
  return out;
}

std::string CanonicalKey(const Snak& snak) {
  std::string out = "[";
  AppendQuoted(out, snak.property);
  out += ',';
  AppendValue(out, snak.value);
  out += ']';
  return out;
}

std::string CanonicalKey(const ReferenceGroup& group) {
  std::vector<std::string> keys;
  keys.reserve(group.size());
  for (const Snak& snak : group) keys.push_back(CanonicalKey(snak));
  std::string out;
  AppendList(out, std::move(keys));
  return out;
}

std::string CanonicalKey(const Statement& statement) {
  std::vector<std::string> qualifiers;
  for (const Snak& q : statement.qualifiers) qualifiers.push_back(CanonicalKey(q));
  std::vector<std::string> references;
  for (const ReferenceGroup& g : statement.references) {
    references.push_back(CanonicalKey(g));
  }
  std::string out = "{\"k\":";
  AppendQuoted(out, RankName(statement.rank));
  out += ",\"p\":";
  AppendQuoted(out, statement.property);
  out += ",\"q\":";
  AppendList(out, std::move(qualifiers));
  out += ",\"r\":";
  AppendList(out, std::move(references));
  out += ",\"v\":";
  AppendValue(out, statement.value);
  out += '}';
  return out;
}

Digest CanonicalHash(const EntityRevision& rev) {
  std::string doc;
  auto section = [&](const char* name, const std::map<std::string, std::string>& values) {
    doc += name;
    doc += '{';
    for (const auto& [key, value] : values) {
      AppendQuoted(doc, key);
      doc += ':';
      AppendQuoted(doc, value);
      doc += ',';
    }
    doc += '}';
  };
  section("labels", rev.labels);
  section("descriptions", rev.descriptions);
  doc += "aliases{";
  for (const auto& [lang, values] : rev.aliases) {
    if (values.empty()) continue;
    AppendQuoted(doc, lang);
    doc += ':';
    std::vector<std::string> quoted;
    for (const std::string& v : values) {
      quoted.emplace_back();
      AppendQuoted(quoted.back(), v);
    }
    AppendList(doc, std::move(quoted));
    doc += ',';
  }
  doc += "}claims{";
  for (const auto& [pid, statements] : rev.statements) {
    if (statements.empty()) continue;
    AppendQuoted(doc, pid);
    doc += ':';
    std::vector<std::string> keys;
    keys.reserve(statements.size());
    for (const Statement& st : statements) keys.push_back(CanonicalKey(st));
    AppendList(doc, std::move(keys));
    doc += ',';
  }
  doc += "}sitelinks{";
  for (const auto& [site, link] : rev.sitelinks) {
    AppendQuoted(doc, site);
    doc += ':';
    AppendQuoted(doc, link.title);
    std::vector<std::string> badges;
    for (const std::string& b : link.badges) {
      badges.emplace_back();
      AppendQuoted(badges.back(), b);
    }
    AppendList(doc, std::move(badges));
    doc += ',';
  }
  doc += '}';
  return Sha1Digest(doc);
}

std::vector<std::string> ReferencedItemIds(const Statement& statement) {
  std::vector<std::string> ids;
  if (statement.value.kind == SnakKind::kItem) ids.push_back(statement.value.text);
  for (const Snak& q : statement.qualifiers) {
    if (q.value.kind == SnakKind::kItem) ids.push_back(q.value.text);
  }
  for (const ReferenceGroup& group : statement.references) {
    for (const Snak& s : group) {
      if (s.value.kind == SnakKind::kItem) ids.push_back(s.value.text);
    }
  }
  return ids;
}

int64_t UrlSnakCount(const Statement& statement) {
  int64_t n = statement.value.kind == SnakKind::kUrl ? 1 : 0;
  for (const Snak& q : statement.qualifiers) n += q.value.kind == SnakKind::kUrl;
  for (const ReferenceGroup& group : statement.references) {
    for (const Snak& s : group) n += s.value.kind == SnakKind::kUrl;
  }
  return n;
}

json UserInfoToJson(const UserInfo& user) {
  json j;
  j["name"] = user.name;
  j["is_anonymous"] = user.is_anonymous;
  j["is_bot"] = user.is_bot;
  j["groups"] = user.groups;
  j["registration"] = user.registration ? json(FormatIsoTimestamp(*user.registration))
                                        : json(nullptr);
  return j;
}

UserInfo UserInfoFromJson(const json& doc) {
  ExpectObject(doc, "user");
  UserInfo user;
  user.name = ExpectString(Require(doc, "name", "user"), "user.name");
  user.is_anonymous = doc.value("is_anonymous", false);
  user.is_bot = doc.value("is_bot", false);
  if (auto it = doc.find("groups"); it != doc.end()) {
    ExpectArray(*it, "user.groups");
    for (const json& g : *it) user.groups.insert(ExpectString(g, "user.groups"));
  }
  if (auto it = doc.find("registration"); it != doc.end() && !it->is_null()) {
    user.registration = ParseIsoTimestamp(ExpectString(*it, "user.registration"));
  }
  if (user.is_anonymous && (user.registration || !user.groups.empty())) {
    Violation("user", "anonymous users have no registration or groups");
  }
  return user;
}

json EditMetaToJson(const EditMeta& meta) {
  json j;
  j["rev_id"] = meta.rev_id;
  j["parent_rev_id"] = meta.parent_rev_id;
  j["user"] = UserInfoToJson(meta.user);
  j["comment"] = meta.comment;
  j["timestamp"] = FormatIsoTimestamp(meta.timestamp);
  return j;
}

EditMeta EditMetaFromJson(const json& doc) {
  ExpectObject(doc, "meta");
  EditMeta meta;
  const json& rev = Require(doc, "rev_id", "meta");
  if (!rev.is_number_integer() || rev.get<int64_t>() <= 0) {
    Violation("meta.rev_id", "expected a positive integer");
  }
  meta.rev_id = rev.get<int64_t>();
  if (auto it = doc.find("parent_rev_id"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int64_t>() < 0) {
      Violation("meta.parent_rev_id", "expected a non-negative integer");
    }
    meta.parent_rev_id = it->get<int64_t>();
  }
  if (meta.parent_rev_id != 0 && meta.parent_rev_id >= meta.rev_id) {
    Violation("meta.parent_rev_id", "parent must precede the revision");
  }
  meta.user = UserInfoFromJson(Require(doc, "user", "meta"));
  if (auto it = doc.find("comment"); it != doc.end() && !it->is_null()) {
    meta.comment = ExpectString(*it, "meta.comment");
  }
  meta.timestamp =
      ParseIsoTimestamp(ExpectString(Require(doc, "timestamp", "meta"), "meta.timestamp"));
  return meta;
}

}  // namespace vsentinel
