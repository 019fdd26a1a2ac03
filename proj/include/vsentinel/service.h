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

#ifndef VSENTINEL_SERVICE_H_
#define VSENTINEL_SERVICE_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vsentinel/corpus.h"
#include "vsentinel/diff.h"
#include "vsentinel/error.h"
#include "vsentinel/forest.h"
#include "vsentinel/ingestion.h"
#include "vsentinel/patterns.h"
#include "vsentinel/score_cache.h"

namespace vsentinel {

enum class ScoreSource { kCache, kFresh };

struct ScoreEntry {
  int64_t rev_id = 0;
  double probability = 0.0;
  bool prediction = false;
  std::string model_version;
  UnixSeconds computed_at = 0;
  ScoreSource source = ScoreSource::kFresh;

  nlohmann::json ToJson() const;
  static ScoreEntry FromJson(const nlohmann::json& doc);
};

using ScoreOutcome = std::variant<ScoreEntry, Error>;

enum class LatencyMode { kSingle, kBatch, kCached };
const char* LatencyModeName(LatencyMode mode);

struct LatencyRecord {
  LatencyMode mode = LatencyMode::kSingle;
  double seconds = 0.0;  // per revision
  int batch_size = 1;
};

struct LatencyStats {
  int64_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

// Median is the mean of the two middle values for even counts; p95 is the
// nearest-rank percentile.
LatencyStats Summarize(std::vector<double> seconds);

class LatencyRecorder {
 public:
  void Record(const LatencyRecord& record);
  std::vector<LatencyRecord> Snapshot() const;
  LatencyStats Stats(LatencyMode mode) const;
  // {"single": {...}, "batch": {...}, "cached": {...}}
  nlohmann::json Report() const;
  std::string Csv() const;

 private:
  mutable std::mutex mu_;
  std::vector<LatencyRecord> records_;
};

std::string LatencyCsv(std::span<const LatencyRecord> records);

struct ServiceOptions {
  double threshold = 0.5;
  size_t max_batch = 50;
};

class ScoringService {
 public:
  // `model` may be null; scoring then fails with ModelUnavailable.
  ScoringService(std::shared_ptr<const TrainedModel> model, RevisionSource* source,
                 ScoreCache* cache, LatencyRecorder* latency, PropertyRegistry registry,
                 PatternConfig patterns, ServiceOptions options);

  // Throws Error(kRevisionNotFound), Error(kUpstreamUnavailable),
  // Error(kModelUnavailable). With `refresh` the cache is not consulted and
  // the stored entry is returned after recomputation.
  ScoreEntry ScoreSingle(int64_t rev_id, bool refresh = false);
  // Throws Error(kBatchTooLarge) or Error(kModelUnavailable); every other
  // failure is reported per revision.
  std::map<int64_t, ScoreOutcome> ScoreBatch(std::span<const int64_t> rev_ids,
                                             bool refresh = false);
  // Scores an envelope already in hand (stream consumers).
  ScoreEntry ScoreEnvelope(const RevisionEnvelope& envelope);

  // Probability for an envelope without touching the cache.
  double Predict(const RevisionEnvelope& envelope) const;
  // The queue summary stored with each score.
  nlohmann::json Detail(const RevisionEnvelope& envelope) const;

  bool has_model() const { return model_ != nullptr; }
  std::string model_version() const { return model_version_; }
  const ServiceOptions& options() const { return options_; }
  ScoreCache& cache() { return *cache_; }
  RevisionSource* source() { return source_; }
  LatencyRecorder* latency() { return latency_; }

 private:
  ScoreEntry FromCache(int64_t rev_id, const CachedScore& score) const;
  ScoreEntry Compute(const RevisionEnvelope& envelope);
  double PredictAnalysis(const EnvelopeAnalysis& analysis) const;
  nlohmann::json DetailOf(const RevisionEnvelope& envelope, const EnvelopeAnalysis& analysis) const;
  void RequireModel() const;

  std::shared_ptr<const TrainedModel> model_;
  std::string model_version_;
  std::vector<size_t> columns_;
  RevisionSource* source_;
  ScoreCache* cache_;
  LatencyRecorder* latency_;
  PropertyRegistry registry_;
  PatternConfig patterns_;
  ServiceOptions options_;

  std::mutex flight_mu_;
  std::map<int64_t, std::shared_future<ScoreEntry>> in_flight_;
};

// Maps source failures to the service's error vocabulary.
Error ServiceError(const Error& source_error);

struct PrecacheStatus {
  int64_t scored = 0;
  int64_t failed = 0;
  int64_t dropped = 0;
  bool halted = false;
  std::string message;
  std::string checkpoint;
};

// Consumes the recent-changes stream and fills the cache. The stream cursor
// is kept in the cache's meta table so a restarted worker resumes.
class PrecacheWorker {
 public:
  struct Options {
    UnixSeconds from_ts = 0;
    std::chrono::milliseconds poll_interval{1000};
  };

  PrecacheWorker(ScoringService* service, Options options);
  ~PrecacheWorker();

  void Start();
  void Stop();
  // Drains the stream until caught up or `limit` envelopes were consumed.
  // Returns the number scored. Throws Error(kCheckpointInvalid).
  int64_t RunOnce(int64_t limit = INT64_MAX);
  PrecacheStatus status() const;
  std::string checkpoint_key() const;

 private:
  void Loop();

  ScoringService* service_;
  Options options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread thread_;
  PrecacheStatus status_;
};

}  // namespace vsentinel

#endif  // VSENTINEL_SERVICE_H_
