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

#include "vsentinel/service.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "vsentinel/corpus.h"
#include "vsentinel/features.h"
#include "vsentinel/timestamp.h"

namespace vsentinel {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json SectionJson(const SectionCounts& c) {
  return {{"added", c.added}, {"removed", c.removed}, {"changed", c.changed}};
}

}  // namespace

json ScoreEntry::ToJson() const {
  return {{"rev_id", rev_id},
          {"probability", {{"true", probability}, {"false", 1.0 - probability}}},
          {"prediction", prediction},
          {"model_version", model_version},
          {"computed_at", FormatIsoTimestamp(computed_at)},
          {"source", source == ScoreSource::kCache ? "cache" : "fresh"}};
}

ScoreEntry ScoreEntry::FromJson(const json& doc) {
  try {
    ScoreEntry e;
    e.rev_id = doc.at("rev_id").get<int64_t>();
    e.probability = doc.at("probability").at("true").get<double>();
    e.prediction = doc.at("prediction").get<bool>();
    e.model_version = doc.at("model_version").get<std::string>();
    e.computed_at = ParseIsoTimestamp(doc.at("computed_at").get<std::string>());
    e.source = doc.at("source").get<std::string>() == "cache" ? ScoreSource::kCache
                                                                : ScoreSource::kFresh;
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kMalformed, std::string("bad score entry: ") + ex.what());
  }
}

const char* LatencyModeName(LatencyMode mode) {
  switch (mode) {
    case LatencyMode::kSingle: return "single";
    case LatencyMode::kBatch: return "batch";
    case LatencyMode::kCached: return "cached";
  }
  return "unknown";
}

LatencyStats Summarize(std::vector<double> seconds) {
  LatencyStats s;
  s.count = static_cast<int64_t>(seconds.size());
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  double sum = 0.0;
  for (double v : seconds) sum += v;
  s.mean = sum / static_cast<double>(seconds.size());
  const size_t n = seconds.size();
  s.median = n % 2 ? seconds[n / 2] : 0.5 * (seconds[n / 2 - 1] + seconds[n / 2]);
  const size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = seconds[std::max<size_t>(rank, 1) - 1];
  return s;
}

void LatencyRecorder::Record(const LatencyRecord& record) {
  std::lock_guard lock(mu_);
  records_.push_back(record);
}

std::vector<LatencyRecord> LatencyRecorder::Snapshot() const {
  std::lock_guard lock(mu_);
  return records_;
}

LatencyStats LatencyRecorder::Stats(LatencyMode mode) const {
  std::vector<double> values;
  for (const LatencyRecord& r : Snapshot()) {
    if (r.mode == mode) values.push_back(r.seconds);
  }
  return Summarize(std::move(values));
}

json LatencyRecorder::Report() const {
  json out = json::object();
  for (LatencyMode mode : {LatencyMode::kSingle, LatencyMode::kBatch, LatencyMode::kCached}) {
    const LatencyStats s = Stats(mode);
    out[LatencyModeName(mode)] = {
        {"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p95", s.p95}};
  }
  return out;
}

std::string LatencyCsv(std::span<const LatencyRecord> records) {
  std::string out = "mode,seconds_per_revision,batch_size\n";
  char buf[96];
  for (const LatencyRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%.9f,%d\n", LatencyModeName(r.mode), r.seconds,
                  r.batch_size);
    out += buf;
  }
  return out;
}

std::string LatencyRecorder::Csv() const { return LatencyCsv(Snapshot()); }

Error ServiceError(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kNotFound:
      return Error(ErrorCode::kRevisionNotFound, e.message(), e.path());
    case ErrorCode::kTransport:
    case ErrorCode::kMalformed:
      return Error(ErrorCode::kUpstreamUnavailable, e.message(), e.path());
    default:
      return e;
  }
}

ScoringService::ScoringService(std::shared_ptr<const TrainedModel> model, RevisionSource* source,
                               ScoreCache* cache, LatencyRecorder* latency,
                               PropertyRegistry registry, PatternConfig patterns,
                               ServiceOptions options)
    : model_(std::move(model)),
      source_(source),
      cache_(cache),
      latency_(latency),
      registry_(std::move(registry)),
      patterns_(std::move(patterns)),
      options_(options) {
  if (!model_) return;
  model_version_ = model_->Version();
  const GroupSet groups = GroupSet::Parse(model_->summary.groups);
  if (model_->feature_names != FeatureNames(groups) ||
      model_->feature_schema_version != patterns_.feature_schema) {
    throw Error(ErrorCode::kSchemaMismatch, "model does not match the feature schema");
  }
  columns_ = FeatureIndices(groups);
}

void ScoringService::RequireModel() const {
  if (!model_) throw Error(ErrorCode::kModelUnavailable, "no model loaded");
}

double ScoringService::Predict(const RevisionEnvelope& envelope) const {
  RequireModel();
  return PredictAnalysis(AnalyzeEnvelope(envelope, registry_, patterns_));
}

double ScoringService::PredictAnalysis(const EnvelopeAnalysis& a) const {
  std::vector<double> x(columns_.size());
  for (size_t j = 0; j < columns_.size(); ++j) x[j] = a.features[columns_[j]];
  return model_->PredictProba(x);
}

json ScoringService::Detail(const RevisionEnvelope& envelope) const {
  return DetailOf(envelope, AnalyzeEnvelope(envelope, registry_, patterns_));
}

json ScoringService::DetailOf(const RevisionEnvelope& envelope, const EnvelopeAnalysis& a) const {
  const UserInfo& u = envelope.meta.user;
  const EntityDiff& d = a.diff;
  json properties = json::array();
  for (const std::string& p : d.changed_properties) properties.push_back(p);
  return {{"item_id", a.item_id},
          {"kind", EditKindName(a.kind)},
          {"comment", envelope.meta.comment},
          {"timestamp", FormatIsoTimestamp(envelope.meta.timestamp)},
          {"user",
           {{"name", u.name},
            {"anonymous", u.is_anonymous},
            {"trusted", patterns_.IsTrusted(u)},
            {"bot", patterns_.IsBot(u)},
            {"log_age", a.features.Get("log_age")}}},
          {"diff",
           {{"labels", SectionJson(d.labels)},
            {"descriptions", SectionJson(d.descriptions)},
            {"aliases", SectionJson(d.aliases)},
            {"statements", SectionJson(d.statements)},
            {"sitelinks", SectionJson(d.sitelinks)},
            {"qualifiers", SectionJson(d.qualifiers)},
            {"references", SectionJson(d.references)},
            {"badges", SectionJson(d.badges)},
            {"properties", properties}}}};
}

ScoreEntry ScoringService::FromCache(int64_t rev_id, const CachedScore& score) const {
  ScoreEntry e;
  e.rev_id = rev_id;
  e.probability = score.probability;
  e.prediction = score.probability >= options_.threshold;
  e.model_version = model_version_;
  e.computed_at = score.computed_at;
  e.source = ScoreSource::kCache;
  return e;
}

ScoreEntry ScoringService::Compute(const RevisionEnvelope& envelope) {
  RequireModel();
  const EnvelopeAnalysis a = AnalyzeEnvelope(envelope, registry_, patterns_);
  CachedScore fresh{PredictAnalysis(a), NowSeconds(), DetailOf(envelope, a).dump()};
  const CachedScore stored = cache_->Put(model_version_, envelope.meta.rev_id, fresh);
  ScoreEntry e = FromCache(envelope.meta.rev_id, stored);
  e.source = ScoreSource::kFresh;
  return e;
}

ScoreEntry ScoringService::ScoreSingle(int64_t rev_id, bool refresh) {
  const Clock::time_point start = Clock::now();
  RequireModel();
  if (!refresh) {
    if (std::optional<CachedScore> hit = cache_->Get(model_version_, rev_id)) {
      ScoreEntry e = FromCache(rev_id, *hit);
      if (latency_) latency_->Record({LatencyMode::kCached, SecondsSince(start), 1});
      return e;
    }
  }
  std::promise<ScoreEntry> promise;
  std::shared_future<ScoreEntry> future;
  bool owner = false;
  {
    std::lock_guard lock(flight_mu_);
    auto it = in_flight_.find(rev_id);
    if (it == in_flight_.end()) {
      future = promise.get_future().share();
      in_flight_.emplace(rev_id, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      // The previous owner may have finished between our cache miss and here.
      std::optional<CachedScore> late;
      if (!refresh) late = cache_->Get(model_version_, rev_id);
      if (late) {
        promise.set_value(FromCache(rev_id, *late));
      } else {
        RevisionEnvelope env;
        try {
          env = source_->FetchRevision(rev_id);
        } catch (const Error& e) {
          throw ServiceError(e);
        }
        promise.set_value(Compute(env));
      }
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    std::lock_guard lock(flight_mu_);
    in_flight_.erase(rev_id);
  }
  ScoreEntry e = future.get();
  if (latency_) latency_->Record({LatencyMode::kSingle, SecondsSince(start), 1});
  return e;
}

std::map<int64_t, ScoreOutcome> ScoringService::ScoreBatch(std::span<const int64_t> rev_ids,
                                                           bool refresh) {
  const Clock::time_point start = Clock::now();
  RequireModel();
  if (rev_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  if (rev_ids.size() > options_.max_batch) {
    throw Error(ErrorCode::kBatchTooLarge, std::to_string(rev_ids.size()) + " ids, limit " +
                                               std::to_string(options_.max_batch));
  }
  const std::set<int64_t> unique(rev_ids.begin(), rev_ids.end());
  std::map<int64_t, ScoreOutcome> out;
  std::vector<int64_t> missing;
  for (int64_t id : unique) {
    std::optional<CachedScore> hit;
    if (!refresh) hit = cache_->Get(model_version_, id);
    if (hit) {
      out.emplace(id, FromCache(id, *hit));
    } else {
      missing.push_back(id);
    }
  }

  std::map<int64_t, std::promise<ScoreEntry>> mine;
  std::map<int64_t, std::shared_future<ScoreEntry>> futures;
  {
    std::lock_guard lock(flight_mu_);
    for (int64_t id : missing) {
      if (auto it = in_flight_.find(id); it != in_flight_.end()) {
        futures.emplace(id, it->second);
      } else {
        futures.emplace(id, mine[id].get_future().share());
        in_flight_.emplace(id, futures[id]);
      }
    }
  }
  if (!mine.empty()) {
    std::vector<int64_t> ids;
    for (const auto& [id, _] : mine) ids.push_back(id);
    std::map<int64_t, FetchResult> fetched;
    try {
      fetched = source_->FetchRevisions(ids);
    } catch (const Error& e) {
      for (int64_t id : ids) fetched.emplace(id, e);
    }
    for (auto& [id, promise] : mine) {
      try {
        auto it = fetched.find(id);
        if (it == fetched.end()) {
          throw Error(ErrorCode::kUpstreamUnavailable, "no answer for " + std::to_string(id));
        }
        if (auto* err = std::get_if<Error>(&it->second)) throw ServiceError(*err);
        promise.set_value(Compute(std::get<RevisionEnvelope>(it->second)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    std::lock_guard lock(flight_mu_);
    for (const auto& [id, _] : mine) in_flight_.erase(id);
  }
  for (const auto& [id, future] : futures) {
    try {
      out.emplace(id, future.get());
    } catch (const Error& e) {
      out.emplace(id, e);
    } catch (const std::exception& e) {
      out.emplace(id, Error(ErrorCode::kMalformed, e.what()));
    }
  }

  if (latency_) {
    const double per_rev = SecondsSince(start) / static_cast<double>(rev_ids.size());
    const LatencyMode mode = missing.empty() ? LatencyMode::kCached : LatencyMode::kBatch;
    latency_->Record({mode, per_rev, static_cast<int>(rev_ids.size())});
  }
  return out;
}

ScoreEntry ScoringService::ScoreEnvelope(const RevisionEnvelope& envelope) {
  RequireModel();
  if (std::optional<CachedScore> hit = cache_->Get(model_version_, envelope.meta.rev_id)) {
    return FromCache(envelope.meta.rev_id, *hit);
  }
  return Compute(envelope);
}

PrecacheWorker::PrecacheWorker(ScoringService* service, Options options)
    : service_(service), options_(options) {}

PrecacheWorker::~PrecacheWorker() { Stop(); }

std::string PrecacheWorker::checkpoint_key() const {
  return "precache_checkpoint:" + service_->model_version();
}

int64_t PrecacheWorker::RunOnce(int64_t limit) {
  std::optional<std::string> checkpoint = service_->cache().GetMeta(checkpoint_key());
  std::unique_ptr<RevisionStream> stream =
      service_->source()->StreamRecent(options_.from_ts, checkpoint);
  int64_t scored = 0;
  for (int64_t consumed = 0; consumed < limit; ++consumed) {
    std::optional<RevisionEnvelope> env;
    try {
      env = stream->Next();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCheckpointInvalid) throw;
      std::lock_guard lock(mu_);
      status_.message = e.what();
      break;
    }
    if (!env) break;
    bool ok = true;
    try {
      service_->ScoreEnvelope(*env);
      ++scored;
    } catch (const Error& e) {
      ok = false;
      std::lock_guard lock(mu_);
      status_.message = e.what();
    }
    const std::string cp = stream->Checkpoint();
    service_->cache().PutMeta(checkpoint_key(), cp);
    std::lock_guard lock(mu_);
    (ok ? status_.scored : status_.failed)++;
    status_.checkpoint = cp;
  }
  std::lock_guard lock(mu_);
  status_.dropped += stream->dropped();
  return scored;
}

void PrecacheWorker::Loop() {
  std::unique_lock lock(mu_);
  while (!stop_) {
    lock.unlock();
    try {
      RunOnce();
    } catch (const Error& e) {
      lock.lock();
      status_.halted = true;
      status_.message = e.what();
      return;
    }
    lock.lock();
    cv_.wait_for(lock, options_.poll_interval, [this] { return stop_; });
  }
}

void PrecacheWorker::Start() {
  std::lock_guard lock(mu_);
  if (thread_.joinable()) return;
  stop_ = false;
  thread_ = std::thread([this] { Loop(); });
}

void PrecacheWorker::Stop() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

PrecacheStatus PrecacheWorker::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

}  // namespace vsentinel
