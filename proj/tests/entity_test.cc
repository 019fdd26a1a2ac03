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

#include <algorithm>

#include <gtest/gtest.h>

#include "json.hpp"
#include "support/generators.h"
#include "vsentinel/error.h"

namespace vsentinel {
namespace {

using nlohmann::json;

Error ParseError(std::string_view text) {
  try {
    ParseEntity(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return Error(ErrorCode::kIo, "");
}

TEST(ParseEntityTest, EmptyItem) {
  EntityRevision rev = ParseEntity(
      R"({"id":"Q62","labels":{},"descriptions":{},"aliases":{},"claims":{},"sitelinks":{}})");
  EXPECT_EQ(rev.item_id, "Q62");
  EXPECT_TRUE(rev.labels.empty());
  EXPECT_TRUE(rev.statements.empty());
  EXPECT_TRUE(rev.sitelinks.empty());
}

TEST(ParseEntityTest, MissingSectionsAndUnknownKeys) {
  EntityRevision rev = ParseEntity(R"({"id":"Q1","lastrevid":5,"pageid":3,"modified":"x"})");
  EXPECT_EQ(rev.item_id, "Q1");
  EXPECT_TRUE(rev.aliases.empty());
}

TEST(ParseEntityTest, SisterCityClaim) {
  EntityRevision rev = ParseEntity(R"({"id":"Q62","claims":{"P190":[{"mainsnak":{
      "snaktype":"value","property":"P190","datatype":"wikibase-item",
      "datavalue":{"value":{"entity-type":"item","numeric-id":90,"id":"Q90"},
                   "type":"wikibase-entityid"}},"type":"statement","rank":"normal"}]}})");
  ASSERT_EQ(rev.statements.count("P190"), 1u);
  ASSERT_EQ(rev.statements["P190"].size(), 1u);
  EXPECT_EQ(rev.statements["P190"][0].value, SnakValue::Item("Q90"));
  EXPECT_EQ(rev.statements["P190"][0].rank, Rank::kNormal);
}

TEST(ParseEntityTest, ClaimsNotAListIsSchemaViolation) {
  Error e = ParseError(R"({"id":"Q1","claims":{"P1":"notalist"}})");
  EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
  EXPECT_EQ(e.path(), "claims.P1");
}

TEST(ParseEntityTest, MalformedJsonCarriesOffset) {
  Error e = ParseError(R"({"id":"Q1",)");
  EXPECT_EQ(e.code(), ErrorCode::kMalformedJson);
  EXPECT_FALSE(e.path().empty());
}

TEST(ParseEntityTest, InvariantViolations) {
  EXPECT_EQ(ParseError(R"({"id":"Q0"})").code(), ErrorCode::kSchemaViolation);
  EXPECT_EQ(ParseError(R"({"id":"P5"})").code(), ErrorCode::kSchemaViolation);
  EXPECT_EQ(ParseError(R"({"id":"Q1","claims":{"X1":[]}})").code(),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(ParseError(R"({"id":"Q1","claims":{"P1":[{"mainsnak":{"snaktype":"value",
      "property":"P1","datatype":"url","datavalue":{"value":"not a url","type":"string"}}}]}})")
                .code(),
            ErrorCode::kSchemaViolation);
}

TEST(ParseEntityTest, ArbitraryBytesNeverEscapeAsOtherExceptions) {
  Rng rng(99);
  const std::string seed_doc =
      SerializeEntity(testing::RandomEntity(rng, testing::EntityShape{.max_per_section = 4}));
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = seed_doc;
    const int flips = static_cast<int>(rng.Range(1, 6));
    for (int f = 0; f < flips && !text.empty(); ++f) {
      const size_t at = rng.Below(text.size());
      switch (rng.Below(3)) {
        case 0: text[at] = static_cast<char>(rng.Below(256)); break;
        case 1: text.erase(at, 1 + rng.Below(8)); break;
        default: text.insert(at, 1, "{}[]\":,0"[rng.Below(8)]);
      }
    }
    if (trial % 10 == 0) {
      text.resize(rng.Below(64));
      for (char& c : text) c = static_cast<char>(rng.Below(256));
    }
    try {
      ParseEntity(text);
    } catch (const Error& e) {
      ASSERT_TRUE(e.code() == ErrorCode::kMalformedJson ||
                  e.code() == ErrorCode::kSchemaViolation)
          << ErrorCodeName(e.code());
    }
  }
}

TEST(EntityPropertyTest, SerializeParseRoundTrip) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const EntityRevision rev = testing::RandomEntity(rng);
    const EntityRevision back = ParseEntity(SerializeEntity(rev));
    ASSERT_EQ(back, rev) << SerializeEntity(rev);
    ASSERT_EQ(CanonicalHash(back), CanonicalHash(rev));
  }
}

TEST(CanonicalHashTest, IgnoresMetadata) {
  Rng rng(2);
  EntityRevision a = testing::RandomEntity(rng);
  EntityRevision b = a;
  b.rev_id = 999;
  b.timestamp = 12345;
  EXPECT_EQ(CanonicalHash(a), CanonicalHash(b));
}

TEST(CanonicalHashTest, OneLabelChangesDigest) {
  EntityRevision a;
  a.item_id = "Q1";
  a.labels["en"] = "San Francisco";
  EntityRevision b = a;
  b.labels["en"] = "SF";
  EXPECT_NE(CanonicalHash(a), CanonicalHash(b));
  EXPECT_EQ(CanonicalHash(a).Hex().size(), 40u);
}

TEST(CanonicalHashTest, PermutationInvariant) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    EntityRevision a = testing::RandomEntity(rng);
    EntityRevision b = a;
    for (auto& [_, list] : b.statements) {
      rng.Shuffle(std::span(list));
      for (Statement& st : list) rng.Shuffle(std::span(st.references));
    }
    for (auto& [_, list] : b.aliases) rng.Shuffle(std::span(list));
    for (auto& [_, link] : b.sitelinks) rng.Shuffle(std::span(link.badges));
    ASSERT_EQ(CanonicalHash(a), CanonicalHash(b));

    // JSON key order: rebuild the document with keys reversed.
    json doc = EntityToJson(a);
    std::string reordered = "{";
    std::vector<std::string> keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
    std::reverse(keys.begin(), keys.end());
    for (size_t i = 0; i < keys.size(); ++i) {
      if (i > 0) reordered += ",";
      reordered += json(keys[i]).dump() + ":" + doc[keys[i]].dump();
    }
    reordered += "}";
    ASSERT_EQ(CanonicalHash(ParseEntity(reordered)), CanonicalHash(a));
  }
}

TEST(UserInfoTest, JsonRoundTrip) {
  UserInfo u;
  u.name = "Alice";
  u.groups = {"sysop", "rollbacker"};
  u.registration = 1388534400;
  EXPECT_EQ(UserInfoFromJson(UserInfoToJson(u)), u);
  UserInfo anon;
  anon.name = "192.0.2.7";
  anon.is_anonymous = true;
  EXPECT_EQ(UserInfoFromJson(UserInfoToJson(anon)), anon);
}

TEST(IdTest, Shapes) {
  EXPECT_TRUE(IsItemId("Q62"));
  EXPECT_FALSE(IsItemId("Q062"));
  EXPECT_FALSE(IsItemId("Q"));
  EXPECT_TRUE(IsPropertyId("P190"));
  EXPECT_FALSE(IsPropertyId("Q190"));
  EXPECT_TRUE(IsAbsoluteUrl("https://example.org/x"));
  EXPECT_FALSE(IsAbsoluteUrl("example.org"));
}

}  // namespace
}  // namespace vsentinel
