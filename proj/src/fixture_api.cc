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

#include "vsentinel/fixture_api.h"

#include <algorithm>

#include "httplib.h"
#include "vsentinel/error.h"
#include "vsentinel/timestamp.h"

namespace vsentinel {

using nlohmann::json;

namespace {

std::vector<std::string> SplitPipe(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t bar = text.find('|', start);
    const size_t end = bar == std::string::npos ? text.size() : bar;
    if (end > start) out.push_back(text.substr(start, end - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string ItemIdOf(const std::string& content) {
  const size_t key = content.find("\"id\"");
  if (key == std::string::npos) return "";
  const size_t open = content.find('"', content.find(':', key) + 1);
  const size_t close = content.find('"', open + 1);
  if (open == std::string::npos || close == std::string::npos) return "";
  return content.substr(open + 1, close - open - 1);
}

std::string Param(const std::multimap<std::string, std::string>& params, const char* key) {
  auto it = params.find(key);
  return it == params.end() ? "" : it->second;
}

json ApiError(const std::string& code, const std::string& info) {
  return {{"error", {{"code", code}, {"info", info}}}};
}

}  // namespace

FixtureWikiApi::FixtureWikiApi(std::span<const RevisionEnvelope> envelopes)
    : FixtureWikiApi(envelopes, Options{}) {}

FixtureWikiApi::FixtureWikiApi(std::span<const RevisionEnvelope> envelopes, Options options)
    : delay_us_(options.delay.count()) {
  for (const RevisionEnvelope& env : envelopes) {
    Rev& rev = revs_[env.meta.rev_id];
    rev.rev_id = env.meta.rev_id;
    rev.parent_id = env.meta.parent_rev_id;
    rev.content = env.child_json;
    rev.item_id = ItemIdOf(env.child_json);
    rev.has_meta = true;
    rev.meta = env.meta;
    if (!env.meta.user.is_anonymous) users_[env.meta.user.name] = env.meta.user;
    changes_.push_back({{env.meta.timestamp, env.meta.rev_id}, env.meta.rev_id});
  }
  // Parents outside the envelope set are still fetchable for their content.
  for (const RevisionEnvelope& env : envelopes) {
    if (!env.parent_json || revs_.contains(env.meta.parent_rev_id)) continue;
    Rev& rev = revs_[env.meta.parent_rev_id];
    rev.rev_id = env.meta.parent_rev_id;
    rev.content = *env.parent_json;
    rev.item_id = ItemIdOf(rev.content);
  }
  std::sort(changes_.begin(), changes_.end());
}

FixtureWikiApi::~FixtureWikiApi() { Stop(); }

void FixtureWikiApi::HideRevision(int64_t rev_id) {
  std::lock_guard lock(mu_);
  hidden_[rev_id] = true;
}

json FixtureWikiApi::Revisions(const std::string& revids) const {
  json pages = json::array();
  json bad = json::object();
  std::map<std::string, json> by_item;
  std::vector<std::string> order;
  std::lock_guard lock(mu_);
  for (const std::string& text : SplitPipe(revids)) {
    int64_t id = 0;
    try {
      id = std::stoll(text);
    } catch (const std::exception&) {
      bad[text] = {{"revid", text}, {"missing", true}};
      continue;
    }
    auto it = revs_.find(id);
    if (it == revs_.end()) {
      bad[text] = {{"revid", id}, {"missing", true}};
      continue;
    }
    const Rev& rev = it->second;
    json r = {{"revid", rev.rev_id}, {"parentid", rev.parent_id}};
    if (rev.has_meta) {
      r["user"] = rev.meta.user.name;
      if (rev.meta.user.is_anonymous) r["anon"] = true;
      r["timestamp"] = FormatIsoTimestamp(rev.meta.timestamp);
      r["comment"] = rev.meta.comment;
    } else {
      r["user"] = "";
      r["timestamp"] = FormatIsoTimestamp(0);
      r["comment"] = "";
    }
    if (hidden_.contains(id)) {
      r["slots"] = {{"main", {{"texthidden", true}}}};
    } else {
      r["slots"] = {{"main",
                     {{"contentmodel", "wikibase-item"},
                      {"contentformat", "application/json"},
                      {"content", rev.content}}}};
    }
    if (!by_item.contains(rev.item_id)) order.push_back(rev.item_id);
    json& page = by_item[rev.item_id];
    if (page.is_null()) {
      page = {{"ns", 0}, {"title", rev.item_id}, {"revisions", json::array()}};
    }
    page["revisions"].push_back(std::move(r));
  }
  for (const std::string& item : order) pages.push_back(std::move(by_item[item]));
  json query = {{"pages", pages}};
  if (!bad.empty()) query["badrevids"] = bad;
  return {{"batchcomplete", true}, {"query", query}};
}

json FixtureWikiApi::Users(const std::string& names) const {
  json users = json::array();
  for (const std::string& name : SplitPipe(names)) {
    auto it = users_.find(name);
    if (it == users_.end()) {
      users.push_back({{"name", name}, {"missing", true}});
      continue;
    }
    json groups = json::array({"*", "user"});
    for (const std::string& g : it->second.groups) groups.push_back(g);
    json u = {{"name", name}, {"groups", groups}};
    u["registration"] = it->second.registration
                            ? json(FormatIsoTimestamp(*it->second.registration))
                            : json(nullptr);
    users.push_back(std::move(u));
  }
  return {{"batchcomplete", true}, {"query", {{"users", users}}}};
}

json FixtureWikiApi::RecentChanges(const std::multimap<std::string, std::string>& params) const {
  StreamCheckpoint from;
  try {
    const std::string start = Param(params, "rcstart");
    if (!start.empty()) from.timestamp = ParseIsoTimestamp(start);
    const std::string cont = Param(params, "rccontinue");
    if (!cont.empty()) from = StreamCheckpoint::Parse(cont);
  } catch (const Error& e) {
    return ApiError("badvalue", e.what());
  }
  if (Param(params, "rcdir") != "newer") return ApiError("badvalue", "only rcdir=newer");
  size_t limit = 50;
  if (const std::string l = Param(params, "rclimit"); !l.empty()) {
    limit = static_cast<size_t>(std::clamp(std::atoll(l.c_str()), 1LL, 500LL));
  }
  auto it = std::lower_bound(changes_.begin(), changes_.end(),
                             std::make_pair(from, int64_t{INT64_MIN}));
  json changes = json::array();
  json out = {{"batchcomplete", true}};
  for (; it != changes_.end(); ++it) {
    if (changes.size() == limit) {
      out["continue"] = {{"rccontinue", it->first.ToString()}, {"continue", "-||"}};
      break;
    }
    changes.push_back({{"type", "edit"},
                       {"ns", 0},
                       {"revid", it->second},
                       {"timestamp", FormatIsoTimestamp(it->first.timestamp)}});
  }
  out["query"] = {{"recentchanges", changes}};
  return out;
}

json FixtureWikiApi::Answer(const std::multimap<std::string, std::string>& params) const {
  if (Param(params, "action") != "query") return ApiError("badvalue", "unsupported action");
  if (Param(params, "prop") == "revisions") return Revisions(Param(params, "revids"));
  const std::string list = Param(params, "list");
  if (list == "users") return Users(Param(params, "ususers"));
  if (list == "recentchanges") return RecentChanges(params);
  return ApiError("badvalue", "unsupported query");
}

void FixtureWikiApi::Start() {
  if (server_) return;
  server_ = std::make_unique<httplib::Server>();
  server_->Get("/w/api.php", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (const int64_t us = delay_us_.load(); us > 0) {
      std::this_thread::sleep_for(std::chrono::microseconds(us));
    }
    int pending = fail_next_.load();
    while (pending > 0 && !fail_next_.compare_exchange_weak(pending, pending - 1)) {
    }
    if (pending > 0) {
      res.status = 503;
      res.set_content("unavailable", "text/plain");
      return;
    }
    std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
    res.set_content(Answer(params).dump(), "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw Error(ErrorCode::kIo, "could not bind fixture API");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void FixtureWikiApi::Stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

std::string FixtureWikiApi::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/w/api.php";
}

}  // namespace vsentinel
