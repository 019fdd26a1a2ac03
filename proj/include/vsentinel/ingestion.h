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

// Revision sources. A source yields RevisionEnvelopes (edit metadata plus the
// parent and child entity JSON) either from a MediaWiki Action API endpoint or
// from a fixture directory:
//
//   <dir>/manifest.txt   one revision id per line, in replay order
//   <dir>/<rev_id>.json  {"meta": {...}, "parent_json": {...}|null,
//                         "child_json": {...}}
//   <dir>/users.json     optional {"<name>": {user info}, ...}

#ifndef VSENTINEL_INGESTION_H_
#define VSENTINEL_INGESTION_H_

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vsentinel/entity.h"
#include "vsentinel/error.h"

namespace vsentinel {

struct RevisionEnvelope {
  EditMeta meta;
  std::optional<std::string> parent_json;  // absent iff meta.parent_rev_id == 0
  std::string child_json;
};

nlohmann::json EnvelopeToJson(const RevisionEnvelope& envelope);
// Checks the envelope invariants; throws Error(kMalformed).
RevisionEnvelope EnvelopeFromJson(const nlohmann::json& doc);

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_base_seconds = 0.5;
};

struct SourceConfig {
  enum class Mode { kLive, kFixture };

  Mode mode = Mode::kFixture;
  std::string api_url;       // live
  double rate_limit = 10.0;  // live, requests per second
  std::string user_agent = "vandal-sentinel/1.0";
  std::filesystem::path fixture_dir;
  RetryPolicy retry;

  // "live:<api url>" or "fixture:<directory>". The user agent defaults from
  // VS_USER_AGENT when set.
  static SourceConfig Parse(std::string_view spec);
  void Validate() const;
  std::string ToString() const;
};

// Stream cursor: (timestamp, rev_id) of the last envelope handed out.
struct StreamCheckpoint {
  UnixSeconds timestamp = 0;
  int64_t rev_id = 0;

  std::string ToString() const;
  // Throws Error(kCheckpointInvalid).
  static StreamCheckpoint Parse(std::string_view text);
  auto operator<=>(const StreamCheckpoint&) const = default;
};

class RevisionStream {
 public:
  virtual ~RevisionStream() = default;
  // Next envelope in non-decreasing timestamp order; nullopt when caught up.
  virtual std::optional<RevisionEnvelope> Next() = 0;
  // Token for the last envelope returned (empty before the first one).
  virtual std::string Checkpoint() const = 0;
  // Revisions listed upstream that could not be fetched and were skipped.
  virtual int64_t dropped() const = 0;
};

using FetchResult = std::variant<RevisionEnvelope, Error>;

class RevisionSource {
 public:
  virtual ~RevisionSource() = default;

  // Throws Error(kNotFound), Error(kTransport) or Error(kMalformed).
  virtual RevisionEnvelope FetchRevision(int64_t rev_id) = 0;
  // One upstream round trip for the whole batch where the backend allows it;
  // failures are reported per id.
  virtual std::map<int64_t, FetchResult> FetchRevisions(
      std::span<const int64_t> rev_ids) = 0;
  // IP-shaped names return an anonymous user without any lookup.
  virtual UserInfo FetchUser(const std::string& name) = 0;
  // Envelopes saved at or after from_ts; resumes after `checkpoint` when set.
  virtual std::unique_ptr<RevisionStream> StreamRecent(
      UnixSeconds from_ts, const std::optional<std::string>& checkpoint) = 0;
};

std::unique_ptr<RevisionSource> OpenSource(const SourceConfig& config);

bool IsIpAddress(std::string_view name);

// Sliding-window limiter: never more than `rate` acquisitions in any window
// of one second (for rate < 1, one per 1/rate seconds).
class RateLimiter {
 public:
  explicit RateLimiter(double rate);
  void Acquire();

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  size_t capacity_;
  Clock::duration window_;
  std::deque<Clock::time_point> recent_;
};

// Fixture directory helpers.
void WriteFixture(const std::filesystem::path& dir,
                  std::span<const RevisionEnvelope> envelopes,
                  const std::map<std::string, UserInfo>& users);
std::vector<RevisionEnvelope> LoadFixtureEnvelopes(const std::filesystem::path& dir);

}  // namespace vsentinel

#endif  // VSENTINEL_INGESTION_H_
