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

#include "vsentinel/corpus.h"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"
#include "vsentinel/random.h"

namespace vsentinel {

using nlohmann::json;

void RevertConfig::Validate() const {
  if (radius < 1) throw Error(ErrorCode::kConfig, "revert radius must be >= 1");
  if (window_seconds <= 0) throw Error(ErrorCode::kConfig, "revert window must be > 0");
}

int64_t ParseDuration(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kConfig, "empty duration");
  int64_t unit = 1;
  switch (text.back()) {
    case 'd': unit = 86400; break;
    case 'h': unit = 3600; break;
    case 'm': unit = 60; break;
    case 's': unit = 1; break;
    default: unit = 0;
  }
  std::string_view digits = unit == 0 ? text : text.substr(0, text.size() - 1);
  if (unit == 0) unit = 1;
  int64_t value = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty() ||
      value < 0) {
    throw Error(ErrorCode::kConfig, "bad duration '" + std::string(text) + "'");
  }
  return value * unit;
}

std::string FormatDuration(int64_t seconds) {
  if (seconds != 0 && seconds % 86400 == 0) return std::to_string(seconds / 86400) + "d";
  if (seconds != 0 && seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
  return std::to_string(seconds) + "s";
}

namespace {

bool InSpan(std::span<const HistoryEntry> history, size_t target, size_t j,
            const RevertConfig& cfg) {
  return static_cast<int64_t>(j - target) <= cfg.radius &&
         history[j].timestamp - history[target].timestamp <= cfg.window_seconds;
}

}  // namespace

bool DetectReverted(std::span<const HistoryEntry> history, size_t target,
                    const RevertConfig& cfg) {
  return RevertDetector(history, cfg).Reverted(target);
}

bool HistoryIncomplete(std::span<const HistoryEntry> history, size_t target,
                       const RevertConfig& cfg) {
  for (size_t j = target + 1; j < history.size(); ++j) {
    if (static_cast<int64_t>(j - target) > cfg.radius) break;
    if (history[j].gap_before && InSpan(history, target, j, cfg)) return true;
  }
  return false;
}

RevertDetector::RevertDetector(std::span<const HistoryEntry> history, const RevertConfig& cfg)
    : history_(history), cfg_(cfg), first_seen_(history.size()) {
  std::map<Digest, size_t> first;
  for (size_t i = 0; i < history.size(); ++i) {
    first_seen_[i] = first.try_emplace(history[i].hash, i).first->second;
  }
}

bool RevertDetector::Reverted(size_t target) const {
  for (size_t j = target + 1; j < history_.size(); ++j) {
    if (static_cast<int64_t>(j - target) > cfg_.radius) break;
    if (InSpan(history_, target, j, cfg_) && first_seen_[j] < target) return true;
  }
  return false;
}

const char* UserTrustName(UserTrust trust) {
  return trust == UserTrust::kTrusted ? "trusted" : "non_trusted";
}

const char* SplitName(SplitAssignment split) {
  switch (split) {
    case SplitAssignment::kTrain: return "train";
    case SplitAssignment::kTest: return "test";
    case SplitAssignment::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

const char* ReviewClassName(ReviewClass cls) {
  switch (cls) {
    case ReviewClass::kVandalism: return "vandalism";
    case ReviewClass::kGoodfaithDamaging: return "goodfaith_damaging";
    case ReviewClass::kGood: return "good";
  }
  return "good";
}

ReviewClass ParseReviewClass(std::string_view name) {
  if (name == "vandalism") return ReviewClass::kVandalism;
  if (name == "goodfaith_damaging") return ReviewClass::kGoodfaithDamaging;
  if (name == "good") return ReviewClass::kGood;
  throw Error(ErrorCode::kSchemaViolation, "unknown review class '" + std::string(name) + "'",
              "class");
}

const char* SampleModeName(SampleMode mode) {
  return mode == SampleMode::kItems ? "items" : "edits";
}

SampleMode ParseSampleMode(std::string_view name) {
  if (name == "edits") return SampleMode::kEdits;
  if (name == "items") return SampleMode::kItems;
  throw Error(ErrorCode::kConfig, "sample mode must be edits or items");
}

bool CorpusRecord::LabelSound() const {
  return !label || (reverted && user_trust == UserTrust::kNonTrusted &&
                    (edit_kind == EditKind::kRegular || edit_kind == EditKind::kCreation));
}

namespace {

json RowJson(const CorpusSummary::Row& row) {
  return {{"edits", row.edits}, {"reverted", row.reverted}};
}

CorpusSummary::Row RowFromJson(const json& doc) {
  return {doc.at("edits").get<int64_t>(), doc.at("reverted").get<int64_t>()};
}

}  // namespace

json CorpusSummary::ToJson() const {
  return {{"trusted", RowJson(trusted)},
          {"merge", RowJson(merge)},
          {"client", RowJson(client)},
          {"revertish", RowJson(revertish)},
          {"non_trusted_regular", RowJson(regular)},
          {"total", total},
          {"positives", positives},
          {"incomplete_history", incomplete_history},
          {"bots_excluded", bots_excluded},
          {"dropped", dropped},
          {"malformed", malformed}};
}

CorpusSummary CorpusSummary::FromJson(const json& doc) {
  CorpusSummary s;
  s.trusted = RowFromJson(doc.at("trusted"));
  s.merge = RowFromJson(doc.at("merge"));
  s.client = RowFromJson(doc.at("client"));
  s.revertish = RowFromJson(doc.at("revertish"));
  s.regular = RowFromJson(doc.at("non_trusted_regular"));
  s.total = doc.at("total").get<int64_t>();
  s.positives = doc.at("positives").get<int64_t>();
  s.incomplete_history = doc.at("incomplete_history").get<int64_t>();
  s.bots_excluded = doc.at("bots_excluded").get<int64_t>();
  s.dropped = doc.at("dropped").get<int64_t>();
  s.malformed = doc.at("malformed").get<int64_t>();
  return s;
}

std::string CorpusSummary::ToTable() const {
  std::ostringstream out;
  auto line = [&](const char* name, const Row& row) {
    const double pct = row.edits ? 100.0 * static_cast<double>(row.reverted) /
                                       static_cast<double>(row.edits)
                                 : 0.0;
    out << std::left << std::setw(32) << name << std::right << std::setw(10) << row.edits
        << std::setw(10) << row.reverted << std::setw(9) << std::fixed
        << std::setprecision(2) << pct << "%\n";
  };
  out << std::left << std::setw(32) << "edit type" << std::right << std::setw(10) << "edits"
      << std::setw(10) << "reverted" << std::setw(10) << "share" << "\n";
  line("trusted users' edits", trusted);
  line("merge edits", merge);
  line("client edits", client);
  line("revert-like edits", revertish);
  line("non-trusted regular edits", regular);
  out << "total " << total << ", labeled vandalism " << positives << ", bots excluded "
      << bots_excluded << ", dropped " << dropped << ", malformed " << malformed
      << ", incomplete history " << incomplete_history << "\n";
  return out.str();
}

void Tabulate(std::span<const CorpusRecord> records, CorpusSummary& summary) {
  summary.trusted = summary.merge = summary.client = summary.revertish =
      summary.regular = {};
  summary.total = static_cast<int64_t>(records.size());
  summary.positives = 0;
  summary.incomplete_history = 0;
  for (const CorpusRecord& r : records) {
    CorpusSummary::Row* row = &summary.regular;
    if (r.user_trust == UserTrust::kTrusted) {
      row = &summary.trusted;
    } else if (r.edit_kind == EditKind::kMerge) {
      row = &summary.merge;
    } else if (r.edit_kind == EditKind::kClient) {
      row = &summary.client;
    } else if (r.edit_kind == EditKind::kRevertish) {
      row = &summary.revertish;
    }
    ++row->edits;
    if (r.reverted) ++row->reverted;
    if (r.label) ++summary.positives;
    if (r.incomplete_history) ++summary.incomplete_history;
  }
}

EnvelopeAnalysis AnalyzeEnvelope(const RevisionEnvelope& envelope,
                                 const PropertyRegistry& registry,
                                 const PatternConfig& config, const EntityRevision* parent,
                                 EntityRevision* child_out) {
  EnvelopeAnalysis out;
  EntityRevision child = ParseEntity(envelope.child_json);
  std::optional<EntityRevision> parsed_parent;
  if (envelope.parent_json && parent == nullptr) {
    parsed_parent = ParseEntity(*envelope.parent_json);
    parent = &*parsed_parent;
  }
  if (!envelope.parent_json) parent = nullptr;
  if (parent) out.parent_hash = CanonicalHash(*parent);
  out.item_id = child.item_id;
  out.child_hash = CanonicalHash(child);
  out.diff = Diff(parent, child, registry);
  out.features = ExtractFeatures(out.diff, child, envelope.meta, registry, config);
  out.kind = ClassifyComment(envelope.meta.comment, envelope.meta, config);
  if (child_out) *child_out = std::move(child);
  return out;
}

namespace {

struct Pending {
  const RevisionEnvelope* envelope;
  EnvelopeAnalysis analysis;
  bool bot = false;
};

}  // namespace

Corpus BuildCorpus(std::span<const RevisionEnvelope> envelopes, const CorpusOptions& options,
                   const PatternConfig& config, const PropertyRegistry& registry) {
  options.revert.Validate();
  Corpus corpus;
  corpus.feature_schema = config.feature_schema;
  corpus.options = options;

  std::map<std::string, std::vector<Pending>> by_item;
  // Last parsed child per revision id, reused when a later envelope carries
  // the same bytes as its parent.
  struct Parsed {
    const std::string* json;
    EntityRevision entity;
  };
  std::map<int64_t, Parsed> recent;
  for (const RevisionEnvelope& env : envelopes) {
    Pending p{&env, {}, config.IsBot(env.meta.user)};
    const EntityRevision* parent = nullptr;
    auto cached = recent.find(env.meta.parent_rev_id);
    if (cached != recent.end() && env.parent_json && *env.parent_json == *cached->second.json) {
      parent = &cached->second.entity;
    }
    EntityRevision child;
    try {
      p.analysis = AnalyzeEnvelope(env, registry, config, parent, &child);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSchemaMismatch) throw;
      ++corpus.summary.malformed;
      continue;
    }
    if (cached != recent.end()) recent.erase(cached);
    recent[env.meta.rev_id] = Parsed{&env.child_json, std::move(child)};
    by_item[p.analysis.item_id].push_back(std::move(p));
  }

  std::vector<CorpusRecord> records;
  for (auto& [item, revisions] : by_item) {
    std::sort(revisions.begin(), revisions.end(), [](const Pending& a, const Pending& b) {
      return a.envelope->meta.rev_id < b.envelope->meta.rev_id;
    });
    // States in rev_id order; a parent state is inserted wherever the chain
    // does not continue from the previous revision.
    std::vector<HistoryEntry> history;
    std::vector<size_t> position(revisions.size());
    for (size_t i = 0; i < revisions.size(); ++i) {
      const EditMeta& meta = revisions[i].envelope->meta;
      const bool continues = !history.empty() && history.back().rev_id == meta.parent_rev_id;
      if (!continues && revisions[i].analysis.parent_hash) {
        history.push_back({meta.parent_rev_id, meta.timestamp,
                           *revisions[i].analysis.parent_hash, !history.empty()});
      }
      history.push_back({meta.rev_id, meta.timestamp, revisions[i].analysis.child_hash,
                         !continues && !history.empty() && !revisions[i].analysis.parent_hash});
      position[i] = history.size() - 1;
    }
    RevertDetector detector(history, options.revert);
    for (size_t i = 0; i < revisions.size(); ++i) {
      Pending& p = revisions[i];
      if (p.bot) {
        ++corpus.summary.bots_excluded;
        continue;
      }
      const EditMeta& meta = p.envelope->meta;
      CorpusRecord r;
      r.rev_id = meta.rev_id;
      r.item_id = item;
      r.timestamp = meta.timestamp;
      r.user_trust = config.IsTrusted(meta.user) ? UserTrust::kTrusted : UserTrust::kNonTrusted;
      r.edit_kind = p.analysis.kind;
      r.incomplete_history = HistoryIncomplete(history, position[i], options.revert);
      r.reverted = !r.incomplete_history && detector.Reverted(position[i]);
      r.label = r.reverted && r.user_trust == UserTrust::kNonTrusted &&
                (r.edit_kind == EditKind::kRegular || r.edit_kind == EditKind::kCreation);
      r.features = p.analysis.features;
      records.push_back(std::move(r));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return a.rev_id < b.rev_id; });

  if (options.sample_size > 0 && static_cast<size_t>(options.sample_size) < records.size()) {
    Rng rng(DeriveSeed(options.seed, 1));
    std::vector<CorpusRecord> sampled;
    if (options.sample == SampleMode::kEdits) {
      std::vector<size_t> order(records.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.Shuffle(std::span(order));
      order.resize(static_cast<size_t>(options.sample_size));
      std::sort(order.begin(), order.end());
      for (size_t i : order) sampled.push_back(std::move(records[i]));
    } else {
      std::map<std::string, std::vector<size_t>> items;
      for (size_t i = 0; i < records.size(); ++i) items[records[i].item_id].push_back(i);
      std::vector<const std::vector<size_t>*> order;
      for (const auto& [_, idx] : items) order.push_back(&idx);
      rng.Shuffle(std::span(order));
      std::vector<size_t> keep;
      for (const auto* idx : order) {
        if (static_cast<int64_t>(keep.size()) >= options.sample_size) break;
        keep.insert(keep.end(), idx->begin(), idx->end());
      }
      std::sort(keep.begin(), keep.end());
      for (size_t i : keep) sampled.push_back(std::move(records[i]));
    }
    records = std::move(sampled);
  }
  corpus.records = std::move(records);
  Tabulate(corpus.records, corpus.summary);
  return corpus;
}

void SplitTrainTest(std::span<CorpusRecord> records, double ratio, uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kConfig, "split ratio must be in [0, 1]");
  }
  for (const CorpusRecord& r : records) {
    if (r.split != SplitAssignment::kUnassigned) {
      throw Error(ErrorCode::kAlreadySplit, "record " + std::to_string(r.rev_id) +
                                                " already has a split");
    }
  }
  std::vector<size_t> order(records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(DeriveSeed(seed, 2));
  rng.Shuffle(std::span(order));
  const auto n_train = static_cast<size_t>(std::floor(static_cast<double>(records.size()) * ratio));
  for (size_t k = 0; k < order.size(); ++k) {
    records[order[k]].split = k < n_train ? SplitAssignment::kTrain : SplitAssignment::kTest;
  }
}

json CorpusRecordToJson(const CorpusRecord& r) {
  json doc = {{"rev_id", r.rev_id},
              {"item_id", r.item_id},
              {"timestamp", FormatIsoTimestamp(r.timestamp)},
              {"user_trust", UserTrustName(r.user_trust)},
              {"edit_kind", EditKindName(r.edit_kind)},
              {"reverted", r.reverted},
              {"label", r.label},
              {"incomplete_history", r.incomplete_history},
              {"split", SplitName(r.split)}};
  doc["features"] = r.features ? json(r.features->values) : json(nullptr);
  if (r.override_label) {
    doc["override"] = {{"class", ReviewClassName(r.override_label->review_class)},
                       {"vandalism", r.override_label->vandalism()},
                       {"reviewer", r.override_label->reviewer},
                       {"labeled_at", FormatIsoTimestamp(r.override_label->labeled_at)}};
  }
  return doc;
}

CorpusRecord CorpusRecordFromJson(const json& doc) {
  CorpusRecord r;
  try {
    r.rev_id = doc.at("rev_id").get<int64_t>();
    r.item_id = doc.at("item_id").get<std::string>();
    r.timestamp = ParseIsoTimestamp(doc.at("timestamp").get<std::string>());
    const std::string trust = doc.at("user_trust").get<std::string>();
    if (trust != "trusted" && trust != "non_trusted") {
      throw Error(ErrorCode::kSchemaViolation, "bad user_trust", "user_trust");
    }
    r.user_trust = trust == "trusted" ? UserTrust::kTrusted : UserTrust::kNonTrusted;
    r.edit_kind = ParseEditKind(doc.at("edit_kind").get<std::string>());
    r.reverted = doc.at("reverted").get<bool>();
    r.label = doc.at("label").get<bool>();
    r.incomplete_history = doc.value("incomplete_history", false);
    const std::string split = doc.at("split").get<std::string>();
    if (split == "train") {
      r.split = SplitAssignment::kTrain;
    } else if (split == "test") {
      r.split = SplitAssignment::kTest;
    } else if (split == "unassigned") {
      r.split = SplitAssignment::kUnassigned;
    } else {
      throw Error(ErrorCode::kSchemaViolation, "bad split '" + split + "'", "split");
    }
    if (const json& f = doc.at("features"); !f.is_null()) {
      if (!f.is_array() || f.size() != kFeatureCount) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "expected " + std::to_string(kFeatureCount) + " features", "features");
      }
      FeatureVector fv;
      for (size_t i = 0; i < kFeatureCount; ++i) fv.values[i] = f[i].get<double>();
      r.features = fv;
    }
    if (auto o = doc.find("override"); o != doc.end() && !o->is_null()) {
      LabelOverride lo;
      lo.review_class = ParseReviewClass(o->at("class").get<std::string>());
      lo.reviewer = o->value("reviewer", std::string());
      lo.labeled_at = ParseIsoTimestamp(o->at("labeled_at").get<std::string>());
      r.override_label = lo;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, e.what(), "record");
  }
  if (!r.LabelSound()) {
    throw Error(ErrorCode::kSchemaViolation,
                "label=true requires a reverted non-trusted regular or creation edit",
                "rev " + std::to_string(r.rev_id));
  }
  return r;
}

std::string SerializeCorpus(const Corpus& corpus) {
  json header = {{"schema", kCorpusSchemaVersion},
                 {"feature_schema", corpus.feature_schema},
                 {"feature_names", FeatureNames()},
                 {"revert_radius", corpus.options.revert.radius},
                 {"revert_window", FormatDuration(corpus.options.revert.window_seconds)},
                 {"sample", SampleModeName(corpus.options.sample)},
                 {"sample_size", corpus.options.sample_size},
                 {"seed", corpus.options.seed},
                 {"summary", corpus.summary.ToJson()}};
  std::string out = header.dump() + "\n";
  for (const CorpusRecord& r : corpus.records) out += CorpusRecordToJson(r).dump() + "\n";
  return out;
}

Corpus ParseCorpus(std::string_view text) {
  Corpus corpus;
  size_t line_no = 0;
  size_t start = 0;
  bool have_header = false;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorCode::kMalformedJson, "unparseable corpus line",
                  "line " + std::to_string(line_no));
    }
    if (!have_header) {
      if (doc.value("schema", "") != kCorpusSchemaVersion) {
        throw Error(ErrorCode::kSchemaMismatch, "not a " + std::string(kCorpusSchemaVersion) +
                                                    " corpus", "line 1");
      }
      try {
        corpus.feature_schema = doc.at("feature_schema").get<std::string>();
        corpus.options.revert.radius = doc.at("revert_radius").get<int64_t>();
        corpus.options.revert.window_seconds =
            ParseDuration(doc.at("revert_window").get<std::string>());
        corpus.options.sample = ParseSampleMode(doc.at("sample").get<std::string>());
        corpus.options.sample_size = doc.at("sample_size").get<int64_t>();
        corpus.options.seed = doc.at("seed").get<uint64_t>();
        corpus.summary = CorpusSummary::FromJson(doc.at("summary"));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kSchemaViolation, e.what(), "line 1");
      }
      if (corpus.feature_schema == kFeatureSchemaVersion &&
          doc.value("feature_names", json::array()) != json(FeatureNames())) {
        throw Error(ErrorCode::kSchemaMismatch, "feature names differ from this build",
                    "line 1");
      }
      have_header = true;
      continue;
    }
    try {
      corpus.records.push_back(CorpusRecordFromJson(doc));
    } catch (const Error& e) {
      throw Error(e.code(), e.message(),
                  "line " + std::to_string(line_no) + (e.path().empty() ? "" : ": " + e.path()));
    }
  }
  if (!have_header) throw Error(ErrorCode::kSchemaViolation, "missing header", "line 1");
  return corpus;
}

void WriteCorpus(const std::filesystem::path& path, const Corpus& corpus) {
  WriteFile(path, SerializeCorpus(corpus));
}

Corpus ReadCorpus(const std::filesystem::path& path) {
  try {
    return ParseCorpus(ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path.string() + (e.path().empty() ? "" : ":" + e.path()));
  }
}

json LabelEventToJson(const LabelEvent& event) {
  return {{"rev_id", event.rev_id},
          {"class", ReviewClassName(event.review_class)},
          {"vandalism", event.review_class == ReviewClass::kVandalism},
          {"reviewer", event.reviewer},
          {"labeled_at", FormatIsoTimestamp(event.labeled_at)}};
}

LabelEvent LabelEventFromJson(const json& doc) {
  LabelEvent event;
  try {
    event.rev_id = doc.at("rev_id").get<int64_t>();
    event.review_class = ParseReviewClass(doc.at("class").get<std::string>());
    event.reviewer = doc.value("reviewer", std::string());
    event.labeled_at = ParseIsoTimestamp(doc.at("labeled_at").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, e.what(), "label");
  }
  if (event.rev_id <= 0) throw Error(ErrorCode::kSchemaViolation, "bad rev_id", "rev_id");
  return event;
}

std::vector<LabelEvent> ParseLabelEvents(std::string_view jsonl) {
  std::vector<LabelEvent> events;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      throw Error(ErrorCode::kMalformedJson, "unparseable label line",
                  "line " + std::to_string(line_no));
    }
    events.push_back(LabelEventFromJson(doc));
  }
  return events;
}

OverrideStats ApplyOverrides(Corpus& corpus, std::span<const LabelEvent> events) {
  std::map<int64_t, const LabelEvent*> latest;
  for (const LabelEvent& e : events) {
    auto [it, inserted] = latest.try_emplace(e.rev_id, &e);
    if (!inserted && e.labeled_at >= it->second->labeled_at) it->second = &e;
  }
  OverrideStats stats;
  for (CorpusRecord& r : corpus.records) {
    auto it = latest.find(r.rev_id);
    if (it == latest.end()) continue;
    r.override_label = LabelOverride{it->second->review_class, it->second->reviewer,
                                     it->second->labeled_at};
    ++stats.applied;
    latest.erase(it);
  }
  stats.unknown = static_cast<int64_t>(latest.size());
  return stats;
}

}  // namespace vsentinel
