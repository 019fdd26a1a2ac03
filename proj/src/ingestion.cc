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

#include <arpa/inet.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

using nlohmann::json;

json EnvelopeToJson(const RevisionEnvelope& envelope) {
  json doc;
  doc["meta"] = EditMetaToJson(envelope.meta);
  doc["parent_json"] =
      envelope.parent_json ? json::parse(*envelope.parent_json) : json(nullptr);
  doc["child_json"] = json::parse(envelope.child_json);
  return doc;
}

RevisionEnvelope EnvelopeFromJson(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kMalformed, "envelope is not an object");
  RevisionEnvelope env;
  try {
    env.meta = EditMetaFromJson(doc.at("meta"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformed, e.message(), e.path());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformed, e.what(), "meta");
  }
  auto text_of = [](const json& j) {
    return j.is_string() ? j.get<std::string>() : j.dump();
  };
  auto child = doc.find("child_json");
  if (child == doc.end() || !(child->is_object() || child->is_string())) {
    throw Error(ErrorCode::kMalformed, "missing child_json", "child_json");
  }
  env.child_json = text_of(*child);
  auto parent = doc.find("parent_json");
  if (parent != doc.end() && !parent->is_null()) env.parent_json = text_of(*parent);
  if (env.parent_json.has_value() != (env.meta.parent_rev_id != 0)) {
    throw Error(ErrorCode::kMalformed,
                "parent_json must be present exactly when parent_rev_id != 0",
                "parent_json");
  }
  return env;
}

SourceConfig SourceConfig::Parse(std::string_view spec) {
  SourceConfig config;
  if (const char* agent = std::getenv("VS_USER_AGENT"); agent && *agent) {
    config.user_agent = agent;
  }
  if (spec.starts_with("live:")) {
    config.mode = Mode::kLive;
    config.api_url = std::string(spec.substr(5));
  } else if (spec.starts_with("fixture:")) {
    config.mode = Mode::kFixture;
    config.fixture_dir = std::string(spec.substr(8));
  } else {
    throw Error(ErrorCode::kConfig,
                "source must be live:<url> or fixture:<dir>, got '" + std::string(spec) + "'");
  }
  config.Validate();
  return config;
}

void SourceConfig::Validate() const {
  if (!(rate_limit > 0)) throw Error(ErrorCode::kConfig, "rate_limit must be > 0");
  if (retry.max_attempts < 1) throw Error(ErrorCode::kConfig, "max_attempts must be >= 1");
  if (retry.backoff_base_seconds < 0) {
    throw Error(ErrorCode::kConfig, "backoff base must be >= 0");
  }
  if (mode == Mode::kLive && api_url.find("://") == std::string::npos) {
    throw Error(ErrorCode::kConfig, "live source needs an absolute API url");
  }
  if (mode == Mode::kFixture && fixture_dir.empty()) {
    throw Error(ErrorCode::kConfig, "fixture source needs a directory");
  }
}

std::string SourceConfig::ToString() const {
  return mode == Mode::kLive ? "live:" + api_url : "fixture:" + fixture_dir.string();
}

std::string StreamCheckpoint::ToString() const {
  return FormatIsoTimestamp(timestamp) + "|" + std::to_string(rev_id);
}

StreamCheckpoint StreamCheckpoint::Parse(std::string_view text) {
  const size_t bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw Error(ErrorCode::kCheckpointInvalid, "expected '<timestamp>|<rev_id>'");
  }
  StreamCheckpoint cp;
  try {
    cp.timestamp = ParseIsoTimestamp(text.substr(0, bar));
  } catch (const Error& e) {
    throw Error(ErrorCode::kCheckpointInvalid, e.message());
  }
  const std::string rev(text.substr(bar + 1));
  if (rev.empty() || rev.size() > 18 ||
      !std::all_of(rev.begin(), rev.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::kCheckpointInvalid, "bad revision id '" + rev + "'");
  }
  cp.rev_id = std::stoll(rev);
  return cp;
}

bool IsIpAddress(std::string_view name) {
  const std::string s(name);
  unsigned char buf[sizeof(struct in6_addr)];
  return inet_pton(AF_INET, s.c_str(), buf) == 1 ||
         inet_pton(AF_INET6, s.c_str(), buf) == 1;
}

RateLimiter::RateLimiter(double rate) {
  if (!(rate > 0)) throw Error(ErrorCode::kConfig, "rate must be > 0");
  capacity_ = static_cast<size_t>(std::max(1.0, std::floor(rate)));
  window_ = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(static_cast<double>(capacity_) / rate));
}

void RateLimiter::Acquire() {
  std::unique_lock lock(mu_);
  while (true) {
    const auto now = Clock::now();
    while (!recent_.empty() && now - recent_.front() >= window_) recent_.pop_front();
    if (recent_.size() < capacity_) {
      recent_.push_back(now);
      return;
    }
    const auto wake = recent_.front() + window_;
    lock.unlock();
    std::this_thread::sleep_until(wake);
    lock.lock();
  }
}

namespace {

UserInfo AnonymousUser(const std::string& name) {
  UserInfo user;
  user.name = name;
  user.is_anonymous = true;
  return user;
}

// --- Fixture mode ----------------------------------------------------------

std::vector<int64_t> ReadManifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.txt";
  std::vector<int64_t> ids;
  if (!std::filesystem::exists(path)) return ids;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      ids.push_back(std::stoll(line));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformed, "bad manifest line '" + line + "'");
    }
  }
  return ids;
}

class FixtureSource;

class FixtureStream : public RevisionStream {
 public:
  FixtureStream(FixtureSource* source, std::vector<int64_t> ids, size_t start,
                UnixSeconds from_ts)
      : source_(source), ids_(std::move(ids)), pos_(start), from_ts_(from_ts) {}

  std::optional<RevisionEnvelope> Next() override;
  std::string Checkpoint() const override { return checkpoint_; }
  int64_t dropped() const override { return dropped_; }

 private:
  FixtureSource* source_;
  std::vector<int64_t> ids_;
  size_t pos_;
  UnixSeconds from_ts_;
  UnixSeconds last_ts_ = INT64_MIN;
  std::string checkpoint_;
  int64_t dropped_ = 0;
};

class FixtureSource : public RevisionSource {
 public:
  explicit FixtureSource(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) {
      throw Error(ErrorCode::kConfig, "fixture directory not found: " + dir_.string());
    }
    const auto users_path = dir_ / "users.json";
    if (std::filesystem::exists(users_path)) {
      json doc = json::parse(ReadFile(users_path), nullptr, false);
      if (!doc.is_object()) throw Error(ErrorCode::kMalformed, "users.json is not an object");
      for (const auto& [name, info] : doc.items()) {
        try {
          users_[name] = UserInfoFromJson(info);
        } catch (const Error& e) {
          throw Error(ErrorCode::kMalformed, e.message(), "users.json:" + name);
        }
      }
    }
  }

  RevisionEnvelope FetchRevision(int64_t rev_id) override {
    if (rev_id <= 0) throw Error(ErrorCode::kInvalidArgument, "rev_id must be positive");
    const auto path = dir_ / (std::to_string(rev_id) + ".json");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kNotFound, "revision " + std::to_string(rev_id));
    }
    json doc = json::parse(ReadFile(path), nullptr, false);
    if (doc.is_discarded()) {
      throw Error(ErrorCode::kMalformed, "unparseable fixture " + path.string());
    }
    RevisionEnvelope env = EnvelopeFromJson(doc);
    if (env.meta.rev_id != rev_id) {
      throw Error(ErrorCode::kMalformed, "fixture " + path.string() + " holds another revision");
    }
    return env;
  }

  std::map<int64_t, FetchResult> FetchRevisions(std::span<const int64_t> rev_ids) override {
    std::map<int64_t, FetchResult> out;
    for (int64_t id : rev_ids) {
      try {
        out.emplace(id, FetchRevision(id));
      } catch (const Error& e) {
        out.emplace(id, e);
      }
    }
    return out;
  }

  UserInfo FetchUser(const std::string& name) override {
    if (IsIpAddress(name)) return AnonymousUser(name);
    auto it = users_.find(name);
    if (it == users_.end()) throw Error(ErrorCode::kNotFound, "user " + name);
    return it->second;
  }

  std::unique_ptr<RevisionStream> StreamRecent(
      UnixSeconds from_ts, const std::optional<std::string>& checkpoint) override {
    std::vector<int64_t> ids = ReadManifest(dir_);
    size_t start = 0;
    if (checkpoint && !checkpoint->empty()) {
      const StreamCheckpoint cp = StreamCheckpoint::Parse(*checkpoint);
      auto it = std::find(ids.begin(), ids.end(), cp.rev_id);
      if (it == ids.end()) {
        throw Error(ErrorCode::kCheckpointInvalid,
                    "revision " + std::to_string(cp.rev_id) + " is not in the manifest");
      }
      start = static_cast<size_t>(it - ids.begin()) + 1;
    }
    return std::make_unique<FixtureStream>(this, std::move(ids), start, from_ts);
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, UserInfo> users_;
};

std::optional<RevisionEnvelope> FixtureStream::Next() {
  while (pos_ < ids_.size()) {
    const int64_t id = ids_[pos_++];
    RevisionEnvelope env;
    try {
      env = source_->FetchRevision(id);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotFound) throw;
      ++dropped_;
      continue;
    }
    if (env.meta.timestamp < last_ts_) {
      throw Error(ErrorCode::kMalformed,
                  "manifest is not in timestamp order at revision " + std::to_string(id));
    }
    last_ts_ = env.meta.timestamp;
    checkpoint_ = StreamCheckpoint{env.meta.timestamp, env.meta.rev_id}.ToString();
    if (env.meta.timestamp < from_ts_) continue;
    return env;
  }
  return std::nullopt;
}

// --- Live mode -------------------------------------------------------------

constexpr size_t kApiBatch = 50;

class LiveSource;

class LiveStream : public RevisionStream {
 public:
  LiveStream(LiveSource* source, UnixSeconds from_ts, std::optional<StreamCheckpoint> cp)
      : source_(source), from_ts_(from_ts), last_(cp) {}

  std::optional<RevisionEnvelope> Next() override;
  std::string Checkpoint() const override { return last_ ? last_->ToString() : ""; }
  int64_t dropped() const override { return dropped_; }

 private:
  void Refill();

  LiveSource* source_;
  UnixSeconds from_ts_;
  std::optional<StreamCheckpoint> last_;
  std::optional<std::string> continue_token_;
  std::deque<RevisionEnvelope> buffer_;
  int64_t dropped_ = 0;
};

class LiveSource : public RevisionSource {
 public:
  explicit LiveSource(const SourceConfig& config)
      : config_(config), limiter_(config.rate_limit) {
    const std::string& url = config.api_url;
    const size_t scheme_end = url.find("://");
    const size_t path_start = url.find('/', scheme_end + 3);
    base_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    client_ = std::make_unique<httplib::Client>(base_);
    client_->set_connection_timeout(5, 0);
    client_->set_read_timeout(30, 0);
    client_->set_keep_alive(true);
  }

  RevisionEnvelope FetchRevision(int64_t rev_id) override {
    if (rev_id <= 0) throw Error(ErrorCode::kInvalidArgument, "rev_id must be positive");
    const int64_t ids[] = {rev_id};
    auto results = FetchRevisions(ids);
    FetchResult& result = results.at(rev_id);
    if (auto* err = std::get_if<Error>(&result)) throw *err;
    return std::move(std::get<RevisionEnvelope>(result));
  }

  std::map<int64_t, FetchResult> FetchRevisions(std::span<const int64_t> rev_ids) override {
    std::map<int64_t, FetchResult> out;
    std::vector<int64_t> ids(rev_ids.begin(), rev_ids.end());
    std::map<int64_t, json> revisions;
    std::map<int64_t, Error> failures;
    QueryRevisions(ids, revisions, failures);

    std::vector<int64_t> parent_ids;
    std::set<std::string> names;
    for (const auto& [id, rev] : revisions) {
      const int64_t parent = rev.value("parentid", int64_t{0});
      if (parent != 0 && !revisions.contains(parent)) parent_ids.push_back(parent);
      if (!rev.value("anon", false)) names.insert(rev.value("user", std::string()));
    }
    std::map<int64_t, json> parents;
    std::map<int64_t, Error> parent_failures;
    if (!parent_ids.empty()) QueryRevisions(parent_ids, parents, parent_failures);
    PrefetchUsers(names);

    for (int64_t id : ids) {
      if (auto f = failures.find(id); f != failures.end()) {
        out.emplace(id, f->second);
        continue;
      }
      try {
        out.emplace(id, BuildEnvelope(revisions.at(id), revisions, parents));
      } catch (const Error& e) {
        out.emplace(id, e);
      }
    }
    return out;
  }

  UserInfo FetchUser(const std::string& name) override {
    if (IsIpAddress(name)) return AnonymousUser(name);
    {
      std::lock_guard lock(users_mu_);
      if (auto it = users_.find(name); it != users_.end()) return it->second;
    }
    PrefetchUsers({name});
    std::lock_guard lock(users_mu_);
    if (auto it = users_.find(name); it != users_.end()) return it->second;
    throw Error(ErrorCode::kNotFound, "user " + name);
  }

  std::unique_ptr<RevisionStream> StreamRecent(
      UnixSeconds from_ts, const std::optional<std::string>& checkpoint) override {
    std::optional<StreamCheckpoint> cp;
    if (checkpoint && !checkpoint->empty()) cp = StreamCheckpoint::Parse(*checkpoint);
    return std::make_unique<LiveStream>(this, from_ts, cp);
  }

  // Raw Action API call with rate limiting and retries on transient failures.
  json Query(httplib::Params params) {
    params.emplace("format", "json");
    params.emplace("formatversion", "2");
    const httplib::Headers headers = {{"User-Agent", config_.user_agent}};
    std::lock_guard lock(request_mu_);
    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      if (attempt > 1) {
        const double delay =
            config_.retry.backoff_base_seconds * std::pow(2.0, attempt - 2);
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
      limiter_.Acquire();
      auto res = client_->Get(path_, params, headers);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500 || res->status == 429) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw Error(ErrorCode::kMalformed, "HTTP " + std::to_string(res->status));
      }
      json doc = json::parse(res->body, nullptr, false);
      if (!doc.is_object()) throw Error(ErrorCode::kMalformed, "API response is not JSON");
      if (auto err = doc.find("error"); err != doc.end()) {
        throw Error(ErrorCode::kMalformed, "API error: " + err->dump());
      }
      return doc;
    }
    throw Error(ErrorCode::kTransport, last_error + " after " +
                                           std::to_string(config_.retry.max_attempts) +
                                           " attempts");
  }

  std::vector<std::pair<StreamCheckpoint, int64_t>> RecentChanges(
      UnixSeconds start, std::optional<std::string>& continue_token) {
    httplib::Params params = {{"action", "query"},
                              {"list", "recentchanges"},
                              {"rcdir", "newer"},
                              {"rcnamespace", "0"},
                              {"rctype", "edit|new"},
                              {"rcprop", "ids|timestamp"},
                              {"rclimit", std::to_string(kApiBatch)},
                              {"rcstart", FormatIsoTimestamp(start)}};
    if (continue_token) params.emplace("rccontinue", *continue_token);
    json doc = Query(params);
    std::vector<std::pair<StreamCheckpoint, int64_t>> out;
    for (const json& rc : doc["query"]["recentchanges"]) {
      const int64_t rev = rc.value("revid", int64_t{0});
      if (rev == 0) continue;
      out.push_back({{ParseIsoTimestamp(rc.value("timestamp", "")), rev}, rev});
    }
    continue_token.reset();
    if (auto c = doc.find("continue"); c != doc.end() && c->contains("rccontinue")) {
      continue_token = (*c)["rccontinue"].get<std::string>();
    }
    return out;
  }

 private:
  void QueryRevisions(const std::vector<int64_t>& ids, std::map<int64_t, json>& found,
                      std::map<int64_t, Error>& failures) {
    for (size_t start = 0; start < ids.size(); start += kApiBatch) {
      std::string joined;
      for (size_t i = start; i < std::min(ids.size(), start + kApiBatch); ++i) {
        if (!joined.empty()) joined += '|';
        joined += std::to_string(ids[i]);
      }
      json doc;
      try {
        doc = Query({{"action", "query"},
                     {"prop", "revisions"},
                     {"revids", joined},
                     {"rvprop", "ids|timestamp|user|comment|content"},
                     {"rvslots", "main"}});
      } catch (const Error& e) {
        for (size_t i = start; i < std::min(ids.size(), start + kApiBatch); ++i) {
          failures.emplace(ids[i], e);
        }
        continue;
      }
      const json& query = doc.contains("query") ? doc["query"] : json::object();
      if (auto bad = query.find("badrevids"); bad != query.end()) {
        for (const auto& [key, _] : bad->items()) {
          const int64_t id = std::stoll(key);
          failures.emplace(id, Error(ErrorCode::kNotFound, "revision " + key));
        }
      }
      if (auto pages = query.find("pages"); pages != query.end()) {
        for (const json& page : *pages) {
          for (const json& rev : page.value("revisions", json::array())) {
            const int64_t id = rev.value("revid", int64_t{0});
            found[id] = rev;
          }
        }
      }
      for (size_t i = start; i < std::min(ids.size(), start + kApiBatch); ++i) {
        if (!found.contains(ids[i]) && !failures.contains(ids[i])) {
          failures.emplace(ids[i], Error(ErrorCode::kNotFound,
                                         "revision " + std::to_string(ids[i])));
        }
      }
    }
  }

  static std::optional<std::string> ContentOf(const json& rev) {
    if (rev.value("texthidden", false) || rev.value("suppressed", false)) return std::nullopt;
    auto slots = rev.find("slots");
    if (slots == rev.end() || !slots->contains("main")) return std::nullopt;
    const json& main = (*slots)["main"];
    if (main.value("texthidden", false) || main.value("missing", false)) return std::nullopt;
    if (auto c = main.find("content"); c != main.end() && c->is_string()) {
      return c->get<std::string>();
    }
    return std::nullopt;
  }

  RevisionEnvelope BuildEnvelope(const json& rev, const std::map<int64_t, json>& batch,
                                 const std::map<int64_t, json>& parents) {
    RevisionEnvelope env;
    const std::string id_text = std::to_string(rev.value("revid", int64_t{0}));
    auto content = ContentOf(rev);
    if (!content || rev.value("userhidden", false)) {
      throw Error(ErrorCode::kNotFound, "revision " + id_text + " is deleted or suppressed");
    }
    env.child_json = std::move(*content);
    env.meta.rev_id = rev.value("revid", int64_t{0});
    env.meta.parent_rev_id = rev.value("parentid", int64_t{0});
    env.meta.comment = rev.value("comment", std::string());
    try {
      env.meta.timestamp = ParseIsoTimestamp(rev.value("timestamp", ""));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformed, e.message(), "revision " + id_text);
    }
    const std::string user = rev.value("user", std::string());
    env.meta.user = rev.value("anon", false) ? AnonymousUser(user) : FetchUser(user);
    if (env.meta.parent_rev_id != 0) {
      const json* parent = nullptr;
      if (auto it = batch.find(env.meta.parent_rev_id); it != batch.end()) parent = &it->second;
      if (auto it = parents.find(env.meta.parent_rev_id); it != parents.end()) parent = &it->second;
      std::optional<std::string> parent_content;
      if (parent) parent_content = ContentOf(*parent);
      if (!parent_content) {
        throw Error(ErrorCode::kNotFound, "parent of revision " + id_text + " is unavailable");
      }
      env.parent_json = std::move(parent_content);
    }
    return env;
  }

  void PrefetchUsers(const std::set<std::string>& names) {
    std::vector<std::string> wanted;
    {
      std::lock_guard lock(users_mu_);
      for (const std::string& n : names) {
        if (!n.empty() && !IsIpAddress(n) && !users_.contains(n)) wanted.push_back(n);
      }
    }
    for (size_t start = 0; start < wanted.size(); start += kApiBatch) {
      std::string joined;
      for (size_t i = start; i < std::min(wanted.size(), start + kApiBatch); ++i) {
        if (!joined.empty()) joined += '|';
        joined += wanted[i];
      }
      json doc = Query({{"action", "query"},
                        {"list", "users"},
                        {"ususers", joined},
                        {"usprop", "groups|registration"}});
      std::lock_guard lock(users_mu_);
      for (const json& u : doc["query"]["users"]) {
        if (u.value("missing", false) || u.value("invalid", false)) continue;
        UserInfo info;
        info.name = u.value("name", std::string());
        for (const json& g : u.value("groups", json::array())) {
          const std::string group = g.get<std::string>();
          if (group != "*") info.groups.insert(group);
        }
        info.is_bot = info.groups.contains("bot");
        if (auto reg = u.find("registration"); reg != u.end() && reg->is_string()) {
          info.registration = ParseIsoTimestamp(reg->get<std::string>());
        }
        users_[info.name] = std::move(info);
      }
    }
  }

  SourceConfig config_;
  RateLimiter limiter_;
  std::string base_;
  std::string path_;
  std::unique_ptr<httplib::Client> client_;
  std::mutex request_mu_;
  std::mutex users_mu_;
  std::map<std::string, UserInfo> users_;
};

std::optional<RevisionEnvelope> LiveStream::Next() {
  if (buffer_.empty()) Refill();
  if (buffer_.empty()) return std::nullopt;
  RevisionEnvelope env = std::move(buffer_.front());
  buffer_.pop_front();
  last_ = StreamCheckpoint{env.meta.timestamp, env.meta.rev_id};
  return env;
}

void LiveStream::Refill() {
  const UnixSeconds start = last_ ? std::max(last_->timestamp, from_ts_) : from_ts_;
  auto changes = source_->RecentChanges(start, continue_token_);
  std::vector<std::pair<StreamCheckpoint, int64_t>> fresh;
  for (const auto& change : changes) {
    if (!last_ || change.first > *last_) fresh.push_back(change);
  }
  std::sort(fresh.begin(), fresh.end());
  std::vector<int64_t> ids;
  for (const auto& [_, id] : fresh) ids.push_back(id);
  if (ids.empty()) return;
  auto results = source_->FetchRevisions(ids);
  for (int64_t id : ids) {
    FetchResult& r = results.at(id);
    if (auto* env = std::get_if<RevisionEnvelope>(&r)) {
      buffer_.push_back(std::move(*env));
    } else {
      ++dropped_;
    }
  }
}

}  // namespace

std::unique_ptr<RevisionSource> OpenSource(const SourceConfig& config) {
  config.Validate();
  if (config.mode == SourceConfig::Mode::kFixture) {
    return std::make_unique<FixtureSource>(config.fixture_dir);
  }
  return std::make_unique<LiveSource>(config);
}

void WriteFixture(const std::filesystem::path& dir,
                  std::span<const RevisionEnvelope> envelopes,
                  const std::map<std::string, UserInfo>& users) {
  std::filesystem::create_directories(dir);
  std::string manifest;
  for (const RevisionEnvelope& env : envelopes) {
    WriteFile(dir / (std::to_string(env.meta.rev_id) + ".json"),
              EnvelopeToJson(env).dump() + "\n");
    manifest += std::to_string(env.meta.rev_id) + "\n";
  }
  WriteFile(dir / "manifest.txt", manifest);
  json users_doc = json::object();
  for (const auto& [name, info] : users) users_doc[name] = UserInfoToJson(info);
  WriteFile(dir / "users.json", users_doc.dump(1) + "\n");
}

std::vector<RevisionEnvelope> LoadFixtureEnvelopes(const std::filesystem::path& dir) {
  FixtureSource source(dir);
  auto stream = source.StreamRecent(INT64_MIN, std::nullopt);
  std::vector<RevisionEnvelope> out;
  while (auto env = stream->Next()) out.push_back(std::move(*env));
  return out;
}

}  // namespace vsentinel
