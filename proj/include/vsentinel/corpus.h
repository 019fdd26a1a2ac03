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

#ifndef VSENTINEL_CORPUS_H_
#define VSENTINEL_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vsentinel/diff.h"
#include "vsentinel/entity.h"
#include "vsentinel/features.h"
#include "vsentinel/ingestion.h"
#include "vsentinel/patterns.h"

namespace vsentinel {

inline constexpr std::string_view kCorpusSchemaVersion = "vs-corpus/1";

struct RevertConfig {
  int64_t radius = 15;                   // revisions
  int64_t window_seconds = 30 * 86400;

  void Validate() const;
};

// "30d", "12h", "90m", "45s" or a bare number of seconds.
int64_t ParseDuration(std::string_view text);
std::string FormatDuration(int64_t seconds);

// One state in an item's history, ordered by rev_id. Entries with
// `gap_before` follow a hole in the parent chain.
struct HistoryEntry {
  int64_t rev_id = 0;
  UnixSeconds timestamp = 0;
  Digest hash;
  bool gap_before = false;
};

// Identity revert: some later entry within cfg.radius revisions and
// cfg.window_seconds restores the hash of an entry strictly before `target`.
bool DetectReverted(std::span<const HistoryEntry> history, size_t target,
                    const RevertConfig& cfg);

// True when the parent chain is broken inside the span DetectReverted looks at.
bool HistoryIncomplete(std::span<const HistoryEntry> history, size_t target,
                       const RevertConfig& cfg);

// Reusable detector for many targets of one history; equivalent to calling
// DetectReverted per target.
class RevertDetector {
 public:
  RevertDetector(std::span<const HistoryEntry> history, const RevertConfig& cfg);
  bool Reverted(size_t target) const;

 private:
  std::span<const HistoryEntry> history_;
  RevertConfig cfg_;
  std::vector<size_t> first_seen_;  // first index holding the same hash
};

enum class UserTrust { kTrusted, kNonTrusted };
enum class SplitAssignment { kUnassigned, kTrain, kTest };
enum class ReviewClass { kVandalism, kGoodfaithDamaging, kGood };

const char* UserTrustName(UserTrust trust);
const char* SplitName(SplitAssignment split);
const char* ReviewClassName(ReviewClass cls);
ReviewClass ParseReviewClass(std::string_view name);

struct LabelOverride {
  ReviewClass review_class = ReviewClass::kGood;
  std::string reviewer;
  UnixSeconds labeled_at = 0;

  bool vandalism() const { return review_class == ReviewClass::kVandalism; }
};

struct CorpusRecord {
  int64_t rev_id = 0;
  std::string item_id;
  UnixSeconds timestamp = 0;
  UserTrust user_trust = UserTrust::kNonTrusted;
  EditKind edit_kind = EditKind::kRegular;
  bool reverted = false;
  bool label = false;  // heuristic label
  bool incomplete_history = false;
  std::optional<FeatureVector> features;
  SplitAssignment split = SplitAssignment::kUnassigned;
  std::optional<LabelOverride> override_label;

  // The reviewer's class when one was recorded, the heuristic label otherwise.
  bool EffectiveLabel() const {
    return override_label ? override_label->vandalism() : label;
  }
  // label => reverted, non-trusted, regular or creation.
  bool LabelSound() const;
};

struct CorpusSummary {
  struct Row {
    int64_t edits = 0;
    int64_t reverted = 0;
    bool operator==(const Row&) const = default;
  };
  // Every record falls in exactly one row: trusted users first, then by kind.
  Row trusted;
  Row merge;
  Row client;
  Row revertish;
  Row regular;  // non-trusted regular edits and creations

  int64_t total = 0;
  int64_t positives = 0;
  int64_t incomplete_history = 0;
  // Outside the record set.
  int64_t bots_excluded = 0;
  int64_t dropped = 0;
  int64_t malformed = 0;

  int64_t RowSum() const {
    return trusted.edits + merge.edits + client.edits + revertish.edits + regular.edits;
  }
  nlohmann::json ToJson() const;
  static CorpusSummary FromJson(const nlohmann::json& doc);
  std::string ToTable() const;
  bool operator==(const CorpusSummary&) const = default;
};

// Recomputes the row counts from the records; keeps the out-of-set counters.
void Tabulate(std::span<const CorpusRecord> records, CorpusSummary& summary);

enum class SampleMode { kEdits, kItems };
const char* SampleModeName(SampleMode mode);
SampleMode ParseSampleMode(std::string_view name);

struct CorpusOptions {
  RevertConfig revert;
  SampleMode sample = SampleMode::kEdits;
  int64_t sample_size = 0;  // 0 keeps every human edit
  uint64_t seed = 0;
};

struct Corpus {
  std::string feature_schema = std::string(kFeatureSchemaVersion);
  CorpusOptions options;
  CorpusSummary summary;
  std::vector<CorpusRecord> records;  // sorted by rev_id
};

// Everything derived from one envelope.
struct EnvelopeAnalysis {
  std::string item_id;
  Digest child_hash;
  std::optional<Digest> parent_hash;
  EntityDiff diff;
  FeatureVector features;
  EditKind kind = EditKind::kRegular;
};

// `parent`, when given, must be the entity parsed from envelope.parent_json.
EnvelopeAnalysis AnalyzeEnvelope(const RevisionEnvelope& envelope,
                                 const PropertyRegistry& registry,
                                 const PatternConfig& config,
                                 const EntityRevision* parent = nullptr,
                                 EntityRevision* child_out = nullptr);

// Envelopes are grouped per item and ordered by rev_id internally. Envelopes
// whose entity JSON does not parse are skipped and counted as malformed.
Corpus BuildCorpus(std::span<const RevisionEnvelope> envelopes, const CorpusOptions& options,
                   const PatternConfig& config, const PropertyRegistry& registry);

// floor(n * ratio) records go to train. Throws Error(kAlreadySplit) when any
// record is already assigned.
void SplitTrainTest(std::span<CorpusRecord> records, double ratio, uint64_t seed);

std::string SerializeCorpus(const Corpus& corpus);
// Throws Error(kSchemaViolation) on records breaking the label invariant.
Corpus ParseCorpus(std::string_view text);
void WriteCorpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus ReadCorpus(const std::filesystem::path& path);

nlohmann::json CorpusRecordToJson(const CorpusRecord& record);
CorpusRecord CorpusRecordFromJson(const nlohmann::json& doc);

struct LabelEvent {
  int64_t rev_id = 0;
  ReviewClass review_class = ReviewClass::kGood;
  std::string reviewer;
  UnixSeconds labeled_at = 0;
};

nlohmann::json LabelEventToJson(const LabelEvent& event);
LabelEvent LabelEventFromJson(const nlohmann::json& doc);
std::vector<LabelEvent> ParseLabelEvents(std::string_view jsonl);

struct OverrideStats {
  int64_t applied = 0;
  int64_t unknown = 0;  // events for revisions outside the corpus
};

// Later events win per revision (by labeled_at, then input order).
OverrideStats ApplyOverrides(Corpus& corpus, std::span<const LabelEvent> events);

}  // namespace vsentinel

#endif  // VSENTINEL_CORPUS_H_
