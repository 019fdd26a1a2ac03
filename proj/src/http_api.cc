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

#include "vsentinel/http_api.h"

#include <algorithm>
#include <chrono>

#include "httplib.h"
#include "vsentinel/eval.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

ErrorCode CodeFromName(const std::string& name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIo); ++c) {
    if (name == ErrorCodeName(static_cast<ErrorCode>(c))) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kMalformed;
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void ReplyError(httplib::Response& res, const Error& e) {
  Reply(res, HttpStatusFor(e.code()), ErrorBody(e));
}

json ParseBody(const httplib::Request& req) {
  json doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  return doc;
}

bool Refresh(const httplib::Request& req) {
  return req.has_param("cache") && req.get_param_value("cache") == "refresh";
}

double NumberParam(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    size_t used = 0;
    const std::string text = req.get_param_value(key);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad ") + key);
  }
}

json OutcomeJson(const ScoreOutcome& outcome) {
  if (const auto* e = std::get_if<Error>(&outcome)) return ErrorBody(*e);
  return std::get<ScoreEntry>(outcome).ToJson();
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRevisionNotFound:
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownRevision:
    case ErrorCode::kMissingCurves:
    case ErrorCode::kMissingReport:
      return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBatchTooLarge:
    case ErrorCode::kMalformedJson:
    case ErrorCode::kSchemaViolation:
      return 400;
    case ErrorCode::kConflictingConcurrentLabel:
      return 409;
    case ErrorCode::kUpstreamUnavailable:
    case ErrorCode::kTransport:
      return 502;
    case ErrorCode::kModelUnavailable:
      return 503;
    default:
      return 500;
  }
}

json ErrorBody(const Error& error) {
  const std::string message =
      error.path().empty() ? error.message() : error.path() + ": " + error.message();
  return {{"error", ErrorCodeName(error.code())}, {"message", message}};
}

QueuePage BuildQueue(ScoringService& service, const LabelStore* labels, double min_score,
                     int64_t page, int64_t page_size) {
  if (page < 0 || page_size <= 0) throw Error(ErrorCode::kInvalidArgument, "bad page");
  struct Row {
    int64_t rev_id;
    CachedScore score;
  };
  std::vector<Row> rows;
  const std::string version = service.model_version();
  for (int64_t id : service.cache().Keys(version)) {
    std::optional<CachedScore> s = service.cache().Get(version, id);
    if (s && s->probability >= min_score) rows.push_back({id, std::move(*s)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score.probability != b.score.probability) {
      return a.score.probability > b.score.probability;
    }
    return a.rev_id < b.rev_id;
  });
  QueuePage out;
  out.total = static_cast<int64_t>(rows.size());
  const int64_t begin = std::min<int64_t>(page * page_size, out.total);
  const int64_t end = std::min<int64_t>(begin + page_size, out.total);
  for (int64_t i = begin; i < end; ++i) {
    const Row& r = rows[static_cast<size_t>(i)];
    json item = {{"rev_id", r.rev_id}, {"probability_true", r.score.probability}};
    json detail = json::parse(r.score.detail, nullptr, false);
    if (detail.is_object()) {
      item["item_id"] = detail.value("item_id", "");
      item["diff"] = detail.value("diff", json::object());
      item["user"] = detail.value("user", json::object());
      item["comment"] = detail.value("comment", "");
    }
    std::optional<LabelEvent> latest = labels ? labels->Latest(r.rev_id) : std::nullopt;
    item["label"] = latest ? ReviewClassName(latest->review_class) : "unlabeled";
    item["labeled_by"] = latest ? json(latest->reviewer) : json(nullptr);
    item["labeled_at"] = latest ? json(FormatIsoTimestamp(latest->labeled_at)) : json(nullptr);
    item["label_events"] = labels ? labels->EventCount(r.rev_id) : 0;
    out.items.push_back(std::move(item));
  }
  return out;
}

ApiServer::ApiServer(ScoringService* service, LabelStore* labels, PrecacheWorker* worker,
                     Options options)
    : service_(service),
      labels_(labels),
      worker_(worker),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  Routes();
}

ApiServer::~ApiServer() { Stop(); }

void ApiServer::Routes() {
  httplib::Server& s = *server_;
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                             std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      ReplyError(res, e);
    } catch (const std::exception& e) {
      Reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  });

  s.Get(R"(/v1/scores/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    int64_t rev_id = 0;
    try {
      rev_id = std::stoll(req.matches[1].str());
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad rev_id");
    }
    Reply(res, 200, service_->ScoreSingle(rev_id, Refresh(req)).ToJson());
  });

  s.Post("/v1/scores", [this](const httplib::Request& req, httplib::Response& res) {
    const json body = ParseBody(req);
    std::vector<int64_t> ids;
    try {
      for (const json& id : body.at("rev_ids")) ids.push_back(id.get<int64_t>());
    } catch (const json::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "rev_ids must be a list of integers");
    }
    json scores = json::object();
    for (const auto& [id, outcome] : service_->ScoreBatch(ids, Refresh(req))) {
      scores[std::to_string(id)] = OutcomeJson(outcome);
    }
    Reply(res, 200, {{"scores", scores}});
  });

  s.Get("/v1/latency", [this](const httplib::Request& req, httplib::Response& res) {
    LatencyRecorder* rec = service_->latency();
    if (req.has_param("format") && req.get_param_value("format") == "csv") {
      res.set_content(rec ? rec->Csv() : LatencyCsv({}), "text/csv");
      return;
    }
    Reply(res, 200, rec ? rec->Report() : LatencyRecorder().Report());
  });

  s.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    json health = {{"status", service_->has_model() ? "ok" : "no_model"},
                   {"model_version", service_->model_version()},
                   {"threshold", service_->options().threshold},
                   {"max_batch", service_->options().max_batch},
                   {"cache",
                    {{"persistent", service_->cache().persistent()},
                     {"memory_entries", service_->cache().memory_entries()}}}};
    if (worker_) {
      const PrecacheStatus st = worker_->status();
      health["precache"] = {{"scored", st.scored},   {"failed", st.failed},
                            {"dropped", st.dropped}, {"halted", st.halted},
                            {"message", st.message}, {"checkpoint", st.checkpoint}};
    }
    Reply(res, 200, health);
  });

  s.Get("/v1/ui/queue", [this](const httplib::Request& req, httplib::Response& res) {
    const double min_score = NumberParam(req, "min_score", 0.0);
    const auto page = static_cast<int64_t>(NumberParam(req, "page", 0));
    const auto page_size = static_cast<int64_t>(NumberParam(req, "page_size", 50));
    const QueuePage q = BuildQueue(*service_, labels_, min_score, page, page_size);
    Reply(res, 200,
          {{"items", q.items}, {"total", q.total}, {"page", page}, {"page_size", page_size},
           {"min_score", min_score}});
  });

  s.Post("/v1/labels", [this](const httplib::Request& req, httplib::Response& res) {
    if (!labels_) throw Error(ErrorCode::kConfig, "no label store configured");
    const json body = ParseBody(req);
    LabelRequest lr;
    try {
      lr.rev_id = body.at("rev_id").get<int64_t>();
      lr.review_class = ParseReviewClass(body.at("class").get<std::string>());
      lr.reviewer = body.at("reviewer").get<std::string>();
      lr.seen_events = body.value("seen_events", int64_t{0});
      lr.confirm = body.value("confirm", false);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, e.message());
    }
    if (!service_->cache().Get(service_->model_version(), lr.rev_id)) {
      throw Error(ErrorCode::kUnknownRevision,
                  "revision " + std::to_string(lr.rev_id) + " is not in the queue");
    }
    try {
      const LabelEvent ev = labels_->Append(lr);
      json out = LabelEventToJson(ev);
      out["events"] = labels_->EventCount(lr.rev_id);
      Reply(res, 201, out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConflictingConcurrentLabel) throw;
      json out = ErrorBody(e);
      out["events"] = labels_->EventCount(lr.rev_id);
      if (auto latest = labels_->Latest(lr.rev_id)) out["latest"] = LabelEventToJson(*latest);
      Reply(res, 409, out);
    }
  });

  s.Get("/v1/labels/export", [this](const httplib::Request& req, httplib::Response& res) {
    if (!labels_) throw Error(ErrorCode::kConfig, "no label store configured");
    const bool history = req.has_param("history") && req.get_param_value("history") == "1";
    res.set_content(LabelStore::ToJsonl(history ? labels_->History() : labels_->Latest()),
                    "application/x-ndjson");
  });

  s.Get("/v1/curves", [this](const httplib::Request& req, httplib::Response& res) {
    const std::filesystem::path& dir = options_.curves_dir;
    if (dir.empty() || !std::filesystem::is_directory(dir)) {
      throw Error(ErrorCode::kMissingCurves, "no curve directory");
    }
    if (!req.has_param("combo")) {
      std::vector<std::string> files;
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path().filename().string());
      }
      std::sort(files.begin(), files.end());
      Reply(res, 200, {{"files", files}});
      return;
    }
    const std::string kind =
        req.has_param("kind") ? req.get_param_value("kind") : std::string("filter_rate");
    if (kind != "filter_rate" && kind != "precision") {
      throw Error(ErrorCode::kInvalidArgument, "kind must be precision or filter_rate");
    }
    std::string combo = req.get_param_value("combo");
    try {
      combo = GroupSet::Parse(combo).ToString();
    } catch (const Error&) {
    }
    const std::filesystem::path file = dir / (CurveFileStem(combo) + "_" + kind + ".csv");
    if (!std::filesystem::exists(file)) {
      throw Error(ErrorCode::kMissingCurves, "no curve " + file.filename().string());
    }
    res.set_content(ReadFile(file), "text/csv");
  });
}

int ApiServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return port_;
}

void ApiServer::Listen() { server_->listen_after_bind(); }

void ApiServer::Start() {
  if (port_ <= 0) Bind("127.0.0.1", 0);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void ApiServer::Stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

ServiceClient::ServiceClient(const std::string& base_url)
    : client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_keep_alive(true);
  client_->set_connection_timeout(5, 0);
  client_->set_read_timeout(60, 0);
}

ServiceClient::~ServiceClient() = default;

namespace {

json Decode(const httplib::Result& res) {
  if (!res) {
    throw Error(ErrorCode::kServiceUnreachable, httplib::to_string(res.error()));
  }
  json doc = json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kMalformed, "non-JSON response");
  if (res->status >= 400) {
    throw Error(CodeFromName(doc.value("error", "")), doc.value("message", ""));
  }
  return doc;
}

}  // namespace

ScoreEntry ServiceClient::Score(int64_t rev_id, bool refresh) {
  std::string path = "/v1/scores/" + std::to_string(rev_id);
  if (refresh) path += "?cache=refresh";
  return ScoreEntry::FromJson(Decode(client_->Get(path)));
}

std::map<int64_t, ScoreOutcome> ServiceClient::ScoreBatch(std::span<const int64_t> rev_ids,
                                                          bool refresh) {
  json body = {{"rev_ids", json(std::vector<int64_t>(rev_ids.begin(), rev_ids.end()))}};
  const json doc = Decode(client_->Post(refresh ? "/v1/scores?cache=refresh" : "/v1/scores",
                                        body.dump(), kJson));
  std::map<int64_t, ScoreOutcome> out;
  for (const auto& [key, value] : doc.at("scores").items()) {
    const int64_t id = std::stoll(key);
    if (value.contains("error")) {
      out.emplace(id, Error(CodeFromName(value.value("error", "")), value.value("message", "")));
    } else {
      out.emplace(id, ScoreEntry::FromJson(value));
    }
  }
  return out;
}

json ServiceClient::Health() { return GetJson("/v1/health"); }

json ServiceClient::GetJson(const std::string& path) { return Decode(client_->Get(path)); }

std::string ServiceClient::GetText(const std::string& path) {
  auto res = client_->Get(path);
  if (!res) throw Error(ErrorCode::kServiceUnreachable, httplib::to_string(res.error()));
  if (res->status >= 400) Decode(res);
  return res->body;
}

json ServiceClient::PostJson(const std::string& path, const json& body) {
  return Decode(client_->Post(path, body.dump(), kJson));
}

std::vector<LatencyRecord> ReplayLatency(ServiceClient& client, std::span<const int64_t> rev_ids,
                                         size_t n, size_t batch) {
  if (rev_ids.size() < n) throw Error(ErrorCode::kInvalidArgument, "not enough revisions");
  if (batch == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  using Clock = std::chrono::steady_clock;
  auto since = [](Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  };
  std::vector<LatencyRecord> records;
  for (size_t i = 0; i < n; ++i) {
    const auto t = Clock::now();
    client.Score(rev_ids[i], true);
    records.push_back({LatencyMode::kSingle, since(t), 1});
  }
  for (size_t start = 0; start < n; start += batch) {
    const size_t size = std::min(batch, n - start);
    const auto t = Clock::now();
    client.ScoreBatch(rev_ids.subspan(start, size), true);
    records.push_back({LatencyMode::kBatch, since(t) / static_cast<double>(size),
                       static_cast<int>(size)});
  }
  for (size_t i = 0; i < n; ++i) {
    const auto t = Clock::now();
    client.Score(rev_ids[i]);
    records.push_back({LatencyMode::kCached, since(t), 1});
  }
  return records;
}

}  // namespace vsentinel
