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

// Ablation evaluation: one model per feature-group combination, scored on
// the held-out split, rendered as a table plus per-combo curve CSVs.

#ifndef VSENTINEL_EVAL_H_
#define VSENTINEL_EVAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsentinel/corpus.h"
#include "vsentinel/features.h"
#include "vsentinel/forest.h"
#include "vsentinel/metrics.h"

namespace vsentinel {

inline constexpr std::string_view kReportSchemaVersion = "vs-eval/1";

std::vector<GroupSet> DefaultCombos();

// Rows of `split` (kUnassigned selects every record) restricted to `groups`,
// labelled with the effective label.
Dataset CorpusDataset(std::span<const CorpusRecord> records, GroupSet groups,
                      SplitAssignment split);

struct ComboResult {
  std::string groups;
  std::optional<std::string> error;  // training or scoring failed
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  std::optional<double> target_recall;  // absent: default operating point
  FilterRateResult op;
  int64_t n_train = 0;
  int64_t n_test = 0;
  int64_t test_positives = 0;
  std::string model_version;
  nlohmann::json params;
  std::vector<OperatingPoint> curve;  // recall non-decreasing
};

struct PaperRow {
  const char* groups;
  double roc_auc;
  double pr_auc;
  double filter_rate;
  double at_recall;
};

std::span<const PaperRow> PaperReference();

struct EvalReport {
  std::vector<ComboResult> rows;
  nlohmann::json config;

  // Any group order is accepted.
  const ComboResult* Find(std::string_view groups) const;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& doc);
  std::string ToTable() const;
  // Two CSVs per scored combo: <name>_precision.csv and <name>_filter_rate.csv.
  std::vector<std::filesystem::path> WriteCurves(const std::filesystem::path& dir) const;
  // report.json, table.txt and curves/ under dir.
  void Write(const std::filesystem::path& dir) const;
  // Throws Error(kMissingReport).
  static EvalReport Read(const std::filesystem::path& dir);
};

std::string CurveFileStem(std::string_view groups);
std::string CurveCsv(std::span<const OperatingPoint> curve, bool filter_rate);

ComboResult ScoreModel(const TrainedModel& model, std::span<const CorpusRecord> records,
                       std::optional<double> target_recall);

// Throws Error(kSchemaMismatch) when the model was trained on another
// feature schema or its columns do not match its recorded groups.
void CheckModelMatchesCorpus(const TrainedModel& model, const Corpus& corpus);

struct AblationOptions {
  std::vector<GroupSet> combos = DefaultCombos();
  std::vector<ForestParams> grid = {ForestParams{}};
  int folds = 5;
  uint64_t seed = 0;
  std::optional<double> target_recall;
};

// Requires a split corpus. Per-combo failures are recorded and the rest run.
EvalReport RunAblation(const Corpus& corpus, const AblationOptions& options);

}  // namespace vsentinel

#endif  // VSENTINEL_EVAL_H_
