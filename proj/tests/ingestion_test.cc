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

#include "vsentinel/ingestion.h"

#include <chrono>

#include <gtest/gtest.h>

#include "support/temp_dir.h"
#include "vsentinel/entity.h"
#include "vsentinel/error.h"
#include "vsentinel/fixture_api.h"
#include "vsentinel/synth.h"

namespace vsentinel {
namespace {

using testing::TempDir;

std::string Entity(const std::string& label) {
  return R"({"id":"Q9","labels":{"en":{"language":"en","value":")" + label + R"("}}})";
}

// Five revisions of Q9 by two users, timestamps one minute apart.
std::vector<RevisionEnvelope> FiveRevisions() {
  std::vector<RevisionEnvelope> out;
  for (int i = 0; i < 5; ++i) {
    RevisionEnvelope env;
    env.meta.rev_id = 100 + i;
    env.meta.parent_rev_id = i == 0 ? 0 : 99 + i;
    env.meta.timestamp = 1420070400 + 60 * i;
    env.meta.comment = "edit " + std::to_string(i);
    if (i % 2 == 0) {
      env.meta.user.name = "Alice";
      env.meta.user.groups = {"sysop"};
      env.meta.user.registration = ParseIsoTimestamp("2014-01-01T00:00:00Z");
    } else {
      env.meta.user.name = "192.0.2.7";
      env.meta.user.is_anonymous = true;
    }
    if (i > 0) env.parent_json = Entity("v" + std::to_string(i - 1));
    env.child_json = Entity("v" + std::to_string(i));
    out.push_back(env);
  }
  return out;
}

std::map<std::string, UserInfo> UsersOf(const std::vector<RevisionEnvelope>& envs) {
  std::map<std::string, UserInfo> users;
  for (const auto& e : envs) {
    if (!e.meta.user.is_anonymous) users[e.meta.user.name] = e.meta.user;
  }
  return users;
}

std::unique_ptr<RevisionSource> Fixture(const std::filesystem::path& dir) {
  return OpenSource(SourceConfig::Parse("fixture:" + dir.string()));
}

std::vector<int64_t> Drain(RevisionStream& stream) {
  std::vector<int64_t> ids;
  while (auto env = stream.Next()) ids.push_back(env->meta.rev_id);
  return ids;
}

TEST(FixtureSourceTest, FetchAndNotFound) {
  TempDir dir;
  const auto envs = FiveRevisions();
  WriteFixture(dir.path(), envs, UsersOf(envs));
  auto source = Fixture(dir.path());
  const RevisionEnvelope env = source->FetchRevision(102);
  EXPECT_EQ(env.meta, envs[2].meta);
  EXPECT_EQ(env.child_json, envs[2].child_json);
  EXPECT_EQ(env.parent_json, envs[2].parent_json);
  try {
    source->FetchRevision(555);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  auto batch = source->FetchRevisions(std::vector<int64_t>{100, 555});
  EXPECT_TRUE(std::holds_alternative<RevisionEnvelope>(batch.at(100)));
  EXPECT_TRUE(std::holds_alternative<Error>(batch.at(555)));
}

TEST(FixtureSourceTest, StreamOrderResumeAndEmpty) {
  TempDir dir;
  const auto envs = FiveRevisions();
  WriteFixture(dir.path(), envs, UsersOf(envs));
  auto source = Fixture(dir.path());
  auto stream = source->StreamRecent(0, std::nullopt);
  EXPECT_EQ(Drain(*stream), (std::vector<int64_t>{100, 101, 102, 103, 104}));

  auto first = source->StreamRecent(0, std::nullopt);
  for (int i = 0; i < 3; ++i) ASSERT_TRUE(first->Next());
  const std::string cp = first->Checkpoint();
  auto resumed = source->StreamRecent(0, cp);
  EXPECT_EQ(Drain(*resumed), (std::vector<int64_t>{103, 104}));

  auto later = source->StreamRecent(1420070400 + 150, std::nullopt);
  EXPECT_EQ(Drain(*later), (std::vector<int64_t>{103, 104}));

  TempDir empty;
  WriteFixture(empty.path(), {}, {});
  auto none = Fixture(empty.path())->StreamRecent(0, std::nullopt);
  EXPECT_FALSE(none->Next());
}

TEST(FixtureSourceTest, BadCheckpoint) {
  TempDir dir;
  const auto envs = FiveRevisions();
  WriteFixture(dir.path(), envs, UsersOf(envs));
  auto source = Fixture(dir.path());
  for (const char* cp : {"garbage", "2015-01-01T00:00:00Z|abc", "2015-01-01T00:00:00Z|999"}) {
    try {
      source->StreamRecent(0, std::string(cp));
      FAIL() << cp;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kCheckpointInvalid) << cp;
    }
  }
}

TEST(FixtureSourceTest, ByteDeterministicReplay) {
  SynthSpec spec;
  spec.n = 300;
  const SynthOutput out = GenerateSynthetic(spec);
  TempDir dir;
  WriteFixture(dir.path(), out.envelopes, out.users);
  const auto a = LoadFixtureEnvelopes(dir.path());
  const auto b = LoadFixtureEnvelopes(dir.path());
  ASSERT_EQ(a.size(), out.envelopes.size());
  for (size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(EnvelopeToJson(a[i]).dump(), EnvelopeToJson(b[i]).dump());
    ASSERT_EQ(EnvelopeToJson(a[i]).dump(), EnvelopeToJson(out.envelopes[i]).dump());
  }
}

TEST(FixtureSourceTest, Users) {
  TempDir dir;
  const auto envs = FiveRevisions();
  WriteFixture(dir.path(), envs, UsersOf(envs));
  auto source = Fixture(dir.path());
  const UserInfo anon = source->FetchUser("192.0.2.7");
  EXPECT_TRUE(anon.is_anonymous);
  EXPECT_TRUE(anon.groups.empty());
  EXPECT_FALSE(anon.registration);
  const UserInfo alice = source->FetchUser("Alice");
  EXPECT_TRUE(alice.groups.contains("sysop"));
  EXPECT_EQ(ParseIsoTimestamp("2015-01-01T00:00:00Z") - *alice.registration, 31536000);
  EXPECT_THROW(source->FetchUser("Nobody"), Error);
}

TEST(SourceConfigTest, ParseAndValidate) {
  SourceConfig live = SourceConfig::Parse("live:https://www.wikidata.org/w/api.php");
  EXPECT_EQ(live.mode, SourceConfig::Mode::kLive);
  EXPECT_NO_THROW(live.Validate());
  live.rate_limit = 0;
  EXPECT_THROW(live.Validate(), Error);
  SourceConfig fx = SourceConfig::Parse("fixture:/tmp/x");
  EXPECT_EQ(fx.fixture_dir, "/tmp/x");
  fx.retry.max_attempts = 0;
  EXPECT_THROW(fx.Validate(), Error);
  EXPECT_THROW(SourceConfig::Parse("ftp:x"), Error);
  EXPECT_THROW(OpenSource(SourceConfig::Parse("fixture:/nonexistent/dir")), Error);
}

TEST(StreamCheckpointTest, RoundTrip) {
  StreamCheckpoint cp{1420070400, 42};
  EXPECT_EQ(cp.ToString(), "2015-01-01T00:00:00Z|42");
  EXPECT_EQ(StreamCheckpoint::Parse(cp.ToString()), cp);
  EXPECT_LT((StreamCheckpoint{1, 5}), (StreamCheckpoint{1, 6}));
}

TEST(IpAddressTest, Shapes) {
  EXPECT_TRUE(IsIpAddress("192.0.2.7"));
  EXPECT_TRUE(IsIpAddress("2001:db8::1"));
  EXPECT_FALSE(IsIpAddress("Alice"));
  EXPECT_FALSE(IsIpAddress("999.1.1.1"));
  EXPECT_FALSE(IsIpAddress("1.2.3"));
}

TEST(RateLimiterTest, SlidingWindowNeverExceeded) {
  RateLimiter limiter(5.0);
  std::vector<std::chrono::steady_clock::time_point> times;
  for (int i = 0; i < 13; ++i) {
    limiter.Acquire();
    times.push_back(std::chrono::steady_clock::now());
  }
  for (size_t i = 0; i < times.size(); ++i) {
    int in_window = 0;
    for (size_t j = i; j < times.size(); ++j) {
      if (times[j] - times[i] < std::chrono::seconds(1)) ++in_window;
    }
    EXPECT_LE(in_window, 5) << "window starting at request " << i;
  }
}

class LiveSourceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthSpec spec;
    spec.n = 120;
    spec.seed = 4;
    synth_ = GenerateSynthetic(spec);
    api_ = std::make_unique<FixtureWikiApi>(synth_.envelopes);
    api_->Start();
  }
  void TearDown() override { api_->Stop(); }

  std::unique_ptr<RevisionSource> Live(int attempts = 3) {
    SourceConfig config = SourceConfig::Parse("live:" + api_->url());
    config.rate_limit = 1000;
    config.retry.max_attempts = attempts;
    config.retry.backoff_base_seconds = 0.01;
    return OpenSource(config);
  }

  SynthOutput synth_;
  std::unique_ptr<FixtureWikiApi> api_;
};

TEST_F(LiveSourceTest, FetchMatchesFixture) {
  auto live = Live();
  for (size_t i = 0; i < synth_.envelopes.size(); i += 7) {
    const RevisionEnvelope& want = synth_.envelopes[i];
    const RevisionEnvelope got = live->FetchRevision(want.meta.rev_id);
    EXPECT_EQ(got.meta.rev_id, want.meta.rev_id);
    EXPECT_EQ(got.meta.parent_rev_id, want.meta.parent_rev_id);
    EXPECT_EQ(got.meta.timestamp, want.meta.timestamp);
    EXPECT_EQ(got.meta.comment, want.meta.comment);
    EXPECT_EQ(got.meta.user.name, want.meta.user.name);
    EXPECT_EQ(got.meta.user.is_anonymous, want.meta.user.is_anonymous);
    EXPECT_EQ(got.meta.user.registration, want.meta.user.registration);
    for (const std::string& g : want.meta.user.groups) EXPECT_TRUE(got.meta.user.groups.contains(g));
    EXPECT_EQ(ParseEntity(got.child_json), ParseEntity(want.child_json));
    ASSERT_EQ(got.parent_json.has_value(), want.parent_json.has_value());
    if (want.parent_json) EXPECT_EQ(ParseEntity(*got.parent_json), ParseEntity(*want.parent_json));
  }
}

TEST_F(LiveSourceTest, RetriesTransientFailures) {
  auto live = Live(3);
  const std::string name = synth_.users.begin()->first;
  const int64_t before = api_->requests();
  api_->FailNext(2);
  const UserInfo user = live->FetchUser(name);
  EXPECT_EQ(user.name, name);
  EXPECT_EQ(api_->requests() - before, 3);
}

TEST_F(LiveSourceTest, TransportAfterRetriesExhausted) {
  auto live = Live(2);
  api_->FailNext(5);
  try {
    live->FetchRevision(synth_.envelopes[3].meta.rev_id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  api_->FailNext(0);
}

TEST_F(LiveSourceTest, MissingAndHiddenRevisionsFailIndividually) {
  auto live = Live();
  const int64_t hidden = synth_.envelopes[10].meta.rev_id;
  api_->HideRevision(hidden);
  const std::vector<int64_t> ids = {synth_.envelopes[9].meta.rev_id, hidden, 987654321,
                                    synth_.envelopes[11].meta.rev_id};
  auto results = live->FetchRevisions(ids);
  ASSERT_EQ(results.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<RevisionEnvelope>(results.at(ids[0])));
  EXPECT_TRUE(std::holds_alternative<RevisionEnvelope>(results.at(ids[3])));
  EXPECT_EQ(std::get<Error>(results.at(hidden)).code(), ErrorCode::kNotFound);
  EXPECT_EQ(std::get<Error>(results.at(987654321)).code(), ErrorCode::kNotFound);
}

TEST_F(LiveSourceTest, RecentChangesStreamInOrderAndResumes) {
  auto live = Live();
  auto stream = live->StreamRecent(0, std::nullopt);
  std::vector<RevisionEnvelope> seen;
  while (auto env = stream->Next()) seen.push_back(std::move(*env));
  ASSERT_EQ(seen.size(), synth_.envelopes.size());
  for (size_t i = 1; i < seen.size(); ++i) {
    ASSERT_LE(seen[i - 1].meta.timestamp, seen[i].meta.timestamp);
  }
  EXPECT_EQ(stream->dropped(), 0);

  auto first = live->StreamRecent(0, std::nullopt);
  for (int i = 0; i < 40; ++i) ASSERT_TRUE(first->Next());
  auto rest = live->StreamRecent(0, first->Checkpoint());
  std::vector<int64_t> tail;
  while (auto env = rest->Next()) tail.push_back(env->meta.rev_id);
  ASSERT_EQ(tail.size(), seen.size() - 40);
  for (size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], seen[40 + i].meta.rev_id);
}

TEST_F(LiveSourceTest, IpUsersSkipTheNetwork) {
  auto live = Live();
  const int64_t before = api_->requests();
  EXPECT_TRUE(live->FetchUser("198.51.100.4").is_anonymous);
  EXPECT_EQ(api_->requests(), before);
}

}  // namespace
}  // namespace vsentinel
