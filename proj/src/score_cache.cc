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

#include "vsentinel/score_cache.h"

#include <sqlite3.h>

#include <algorithm>
#include <set>

#include "vsentinel/error.h"

namespace vsentinel {

namespace {

constexpr size_t kSlotOverhead = 96;

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::kIo, std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& Bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& Bind(int i, int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  Statement& Bind(int i, double v) {
    sqlite3_bind_double(stmt_, i, v);
    return *this;
  }
  bool Step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::kIo,
                std::string("sqlite step: ") + sqlite3_errmsg(sqlite3_db_handle(stmt_)));
  }
  int64_t Int(int col) { return sqlite3_column_int64(stmt_, col); }
  double Real(int col) { return sqlite3_column_double(stmt_, col); }
  std::string Text(int col) {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<size_t>(sqlite3_column_bytes(stmt_, col))) : "";
  }

 private:
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

size_t ScoreCache::EntryBytes(const std::string& model_version, const CachedScore& score) {
  return kSlotOverhead + model_version.size() + score.detail.size();
}

ScoreCache::ScoreCache(Options options) : options_(std::move(options)) {
  if (options_.dir.empty()) return;
  std::filesystem::create_directories(options_.dir);
  const std::string path = (options_.dir / "scores.sqlite").string();
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::kIo, "cannot open score cache " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  Exec("PRAGMA journal_mode=WAL");
  Exec("PRAGMA synchronous=NORMAL");
  Exec(
      "CREATE TABLE IF NOT EXISTS scores ("
      " model_version TEXT NOT NULL, rev_id INTEGER NOT NULL, probability REAL NOT NULL,"
      " computed_at INTEGER NOT NULL, detail TEXT NOT NULL, bytes INTEGER NOT NULL,"
      " used INTEGER NOT NULL, PRIMARY KEY (model_version, rev_id))");
  Exec("CREATE INDEX IF NOT EXISTS scores_used ON scores (used)");
  Exec("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)");
  Statement st(db_, "SELECT COALESCE(MAX(used), 0), COALESCE(SUM(bytes), 0) FROM scores");
  if (st.Step()) {
    clock_ = st.Int(0);
    disk_bytes_ = st.Int(1);
  }
}

ScoreCache::~ScoreCache() {
  if (db_) sqlite3_close(db_);
}

void ScoreCache::Exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    const std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::kIo, "sqlite: " + msg);
  }
}

void ScoreCache::Touch(std::map<Key, Slot>::iterator it) {
  lru_.splice(lru_.begin(), lru_, it->second.lru);
}

void ScoreCache::InsertMemory(const Key& key, const CachedScore& score) {
  const size_t bytes = EntryBytes(key.first, score);
  if (bytes > options_.memory_budget_bytes) return;
  lru_.push_front(key);
  memory_.emplace(key, Slot{score, lru_.begin()});
  memory_bytes_ += bytes;
  while (memory_bytes_ > options_.memory_budget_bytes) {
    auto victim = memory_.find(lru_.back());
    memory_bytes_ -= EntryBytes(victim->first.first, victim->second.score);
    memory_.erase(victim);
    lru_.pop_back();
  }
}

std::optional<CachedScore> ScoreCache::LoadDisk(const Key& key) {
  if (!db_) return std::nullopt;
  Statement st(db_,
               "SELECT probability, computed_at, detail FROM scores"
               " WHERE model_version = ?1 AND rev_id = ?2");
  st.Bind(1, key.first).Bind(2, key.second);
  if (!st.Step()) return std::nullopt;
  CachedScore score{st.Real(0), st.Int(1), st.Text(2)};
  Statement touch(db_, "UPDATE scores SET used = ?1 WHERE model_version = ?2 AND rev_id = ?3");
  touch.Bind(1, ++clock_).Bind(2, key.first).Bind(3, key.second).Step();
  return score;
}

void ScoreCache::StoreDisk(const Key& key, const CachedScore& score) {
  if (!db_) return;
  Statement st(db_,
               "INSERT OR IGNORE INTO scores"
               " (model_version, rev_id, probability, computed_at, detail, bytes, used)"
               " VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)");
  st.Bind(1, key.first)
      .Bind(2, key.second)
      .Bind(3, score.probability)
      .Bind(4, score.computed_at)
      .Bind(5, score.detail)
      .Bind(6, static_cast<int64_t>(EntryBytes(key.first, score)))
      .Bind(7, ++clock_)
      .Step();
  if (sqlite3_changes(db_) == 1) disk_bytes_ += static_cast<int64_t>(EntryBytes(key.first, score));
  EvictDisk();
}

void ScoreCache::EvictDisk() {
  const auto budget = static_cast<int64_t>(options_.disk_budget_bytes);
  if (disk_bytes_ <= budget) return;
  std::vector<std::pair<Key, int64_t>> doomed;
  {
    Statement oldest(db_, "SELECT model_version, rev_id, bytes FROM scores ORDER BY used");
    int64_t total = disk_bytes_;
    while (total > budget && oldest.Step()) {
      doomed.push_back({{oldest.Text(0), oldest.Int(1)}, oldest.Int(2)});
      total -= oldest.Int(2);
    }
  }
  for (const auto& [key, bytes] : doomed) {
    Statement del(db_, "DELETE FROM scores WHERE model_version = ?1 AND rev_id = ?2");
    del.Bind(1, key.first).Bind(2, key.second).Step();
    disk_bytes_ -= bytes;
  }
}

std::optional<CachedScore> ScoreCache::Get(const std::string& model_version, int64_t rev_id) {
  std::lock_guard lock(mu_);
  const Key key{model_version, rev_id};
  if (auto it = memory_.find(key); it != memory_.end()) {
    Touch(it);
    return it->second.score;
  }
  std::optional<CachedScore> score = LoadDisk(key);
  if (score) InsertMemory(key, *score);
  return score;
}

CachedScore ScoreCache::Put(const std::string& model_version, int64_t rev_id,
                            const CachedScore& score) {
  std::lock_guard lock(mu_);
  const Key key{model_version, rev_id};
  if (auto it = memory_.find(key); it != memory_.end()) {
    Touch(it);
    return it->second.score;
  }
  if (std::optional<CachedScore> existing = LoadDisk(key)) {
    InsertMemory(key, *existing);
    return *existing;
  }
  StoreDisk(key, score);
  InsertMemory(key, score);
  return score;
}

std::vector<int64_t> ScoreCache::Keys(const std::string& model_version) {
  std::lock_guard lock(mu_);
  std::set<int64_t> ids;
  for (auto it = memory_.lower_bound({model_version, INT64_MIN});
       it != memory_.end() && it->first.first == model_version; ++it) {
    ids.insert(it->first.second);
  }
  if (db_) {
    Statement st(db_, "SELECT rev_id FROM scores WHERE model_version = ?1");
    st.Bind(1, model_version);
    while (st.Step()) ids.insert(st.Int(0));
  }
  return {ids.begin(), ids.end()};
}

size_t ScoreCache::memory_entries() const {
  std::lock_guard lock(mu_);
  return memory_.size();
}

size_t ScoreCache::memory_bytes() const {
  std::lock_guard lock(mu_);
  return memory_bytes_;
}

std::optional<std::string> ScoreCache::GetMeta(const std::string& key) {
  std::lock_guard lock(mu_);
  if (!db_) {
    auto it = meta_.find(key);
    return it == meta_.end() ? std::nullopt : std::optional<std::string>(it->second);
  }
  Statement st(db_, "SELECT value FROM meta WHERE key = ?1");
  st.Bind(1, key);
  if (!st.Step()) return std::nullopt;
  return st.Text(0);
}

void ScoreCache::PutMeta(const std::string& key, const std::string& value) {
  std::lock_guard lock(mu_);
  if (!db_) {
    meta_[key] = value;
    return;
  }
  Statement st(db_, "INSERT OR REPLACE INTO meta (key, value) VALUES (?1, ?2)");
  st.Bind(1, key).Bind(2, value).Step();
}

}  // namespace vsentinel
