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

// Score cache keyed by (model_version, rev_id). An in-memory LRU sits in
// front of an optional SQLite file; both are bounded by a byte budget.
// Entries are write-once.

#ifndef VSENTINEL_SCORE_CACHE_H_
#define VSENTINEL_SCORE_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsentinel/timestamp.h"

struct sqlite3;

namespace vsentinel {

struct CachedScore {
  double probability = 0.0;
  UnixSeconds computed_at = 0;
  std::string detail;  // JSON text describing the edit for the review queue

  bool operator==(const CachedScore&) const = default;
};

class ScoreCache {
 public:
  struct Options {
    std::filesystem::path dir;  // empty: memory only
    size_t memory_budget_bytes = size_t{32} << 20;
    size_t disk_budget_bytes = size_t{512} << 20;
  };

  explicit ScoreCache(Options options);
  ScoreCache() : ScoreCache(Options{}) {}
  ~ScoreCache();

  ScoreCache(const ScoreCache&) = delete;
  ScoreCache& operator=(const ScoreCache&) = delete;

  std::optional<CachedScore> Get(const std::string& model_version, int64_t rev_id);
  // Keeps the existing entry when the key is already present; returns the
  // entry that is now stored.
  CachedScore Put(const std::string& model_version, int64_t rev_id, const CachedScore& score);

  // Every stored key for one model, ascending rev_id.
  std::vector<int64_t> Keys(const std::string& model_version);
  size_t memory_entries() const;
  size_t memory_bytes() const;
  bool persistent() const { return db_ != nullptr; }

  std::optional<std::string> GetMeta(const std::string& key);
  void PutMeta(const std::string& key, const std::string& value);

  static size_t EntryBytes(const std::string& model_version, const CachedScore& score);

 private:
  using Key = std::pair<std::string, int64_t>;
  struct Slot {
    CachedScore score;
    std::list<Key>::iterator lru;
  };

  void Touch(std::map<Key, Slot>::iterator it);
  void InsertMemory(const Key& key, const CachedScore& score);
  std::optional<CachedScore> LoadDisk(const Key& key);
  void StoreDisk(const Key& key, const CachedScore& score);
  void EvictDisk();
  void Exec(const char* sql);

  Options options_;
  mutable std::mutex mu_;
  std::map<Key, Slot> memory_;
  std::list<Key> lru_;  // front is most recent
  size_t memory_bytes_ = 0;
  sqlite3* db_ = nullptr;
  int64_t clock_ = 0;  // disk recency counter
  int64_t disk_bytes_ = 0;
  std::map<std::string, std::string> meta_;  // memory-only mode
};

}  // namespace vsentinel

#endif  // VSENTINEL_SCORE_CACHE_H_
