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

// Local stand-in for a MediaWiki Action API endpoint, answering the queries
// LiveSource issues (prop=revisions, list=users, list=recentchanges) from a
// set of envelopes. Used by tests and the latency replay.

#ifndef VSENTINEL_FIXTURE_API_H_
#define VSENTINEL_FIXTURE_API_H_

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vsentinel/ingestion.h"

namespace httplib {
class Server;
struct Request;
}  // namespace httplib

namespace vsentinel {

class FixtureWikiApi {
 public:
  struct Options {
    // Added to every request before it is answered.
    std::chrono::microseconds delay{0};
  };

  FixtureWikiApi(std::span<const RevisionEnvelope> envelopes, Options options);
  FixtureWikiApi(std::span<const RevisionEnvelope> envelopes);
  ~FixtureWikiApi();

  FixtureWikiApi(const FixtureWikiApi&) = delete;
  FixtureWikiApi& operator=(const FixtureWikiApi&) = delete;

  // Binds 127.0.0.1 on a free port and serves in a background thread.
  void Start();
  void Stop();

  // e.g. "http://127.0.0.1:41234/w/api.php"
  std::string url() const;
  int port() const { return port_; }

  // The next `n` requests answer HTTP 503.
  void FailNext(int n) { fail_next_ = n; }
  void SetDelay(std::chrono::microseconds delay) { delay_us_ = delay.count(); }
  int64_t requests() const { return requests_; }
  void HideRevision(int64_t rev_id);

  // The query handler without HTTP, for direct inspection.
  nlohmann::json Answer(const std::multimap<std::string, std::string>& params) const;

 private:
  struct Rev {
    int64_t rev_id = 0;
    int64_t parent_id = 0;
    std::string item_id;
    std::string content;
    bool has_meta = false;
    EditMeta meta;
  };

  nlohmann::json Revisions(const std::string& revids) const;
  nlohmann::json Users(const std::string& names) const;
  nlohmann::json RecentChanges(const std::multimap<std::string, std::string>& params) const;

  std::map<int64_t, Rev> revs_;
  std::map<std::string, UserInfo> users_;
  std::vector<std::pair<StreamCheckpoint, int64_t>> changes_;  // sorted
  mutable std::mutex mu_;
  std::map<int64_t, bool> hidden_;

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> fail_next_{0};
  std::atomic<int64_t> delay_us_{0};
  std::atomic<int64_t> requests_{0};
};

}  // namespace vsentinel

#endif  // VSENTINEL_FIXTURE_API_H_
