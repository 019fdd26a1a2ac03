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

// HTTP surface of the scoring service:
//
//   GET  /v1/scores/<rev_id>[?cache=refresh]
//   POST /v1/scores            {"rev_ids": [...]}[?cache=refresh]
//   GET  /v1/latency[?format=csv]
//   GET  /v1/health
//   GET  /v1/ui/queue?min_score=&page=&page_size=
//   POST /v1/labels            {"rev_id", "class", "reviewer", "seen_events", "confirm"}
//   GET  /v1/labels/export[?history=1]
//   GET  /v1/curves[?combo=&kind=precision|filter_rate]
//
// Errors are {"error": "<ErrorCode name>", "message": "..."}.

#ifndef VSENTINEL_HTTP_API_H_
#define VSENTINEL_HTTP_API_H_

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vsentinel/labels.h"
#include "vsentinel/service.h"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace vsentinel {

int HttpStatusFor(ErrorCode code);
nlohmann::json ErrorBody(const Error& error);

struct QueuePage {
  std::vector<nlohmann::json> items;
  int64_t total = 0;  // items at or above min_score
};

// Cached scores for the current model at or above min_score, sorted by
// probability descending then rev_id ascending.
QueuePage BuildQueue(ScoringService& service, const LabelStore* labels, double min_score,
                     int64_t page, int64_t page_size);

class ApiServer {
 public:
  struct Options {
    std::filesystem::path curves_dir;
  };

  ApiServer(ScoringService* service, LabelStore* labels, PrecacheWorker* worker,
            Options options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Port 0 picks a free one. Returns the bound port.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Listen();
  // Serves from a background thread.
  void Start();
  void Stop();
  int port() const { return port_; }

 private:
  void Routes();

  ScoringService* service_;
  LabelStore* labels_;
  PrecacheWorker* worker_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

// Thin client used by the latency replay and tests. Connection failures
// throw Error(kServiceUnreachable); error bodies are rethrown with their code.
class ServiceClient {
 public:
  explicit ServiceClient(const std::string& base_url);
  ~ServiceClient();

  ScoreEntry Score(int64_t rev_id, bool refresh = false);
  std::map<int64_t, ScoreOutcome> ScoreBatch(std::span<const int64_t> rev_ids,
                                             bool refresh = false);
  nlohmann::json Health();
  nlohmann::json GetJson(const std::string& path);
  std::string GetText(const std::string& path);
  nlohmann::json PostJson(const std::string& path, const nlohmann::json& body);

 private:
  std::unique_ptr<httplib::Client> client_;
};

// n single requests (fresh), ceil(n / batch) batch requests (fresh) over the
// same revisions, then n cached re-requests. `rev_ids` must hold at least n.
std::vector<LatencyRecord> ReplayLatency(ServiceClient& client, std::span<const int64_t> rev_ids,
                                         size_t n, size_t batch = 50);

}  // namespace vsentinel

#endif  // VSENTINEL_HTTP_API_H_
