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

#include "vsentinel/eval.h"

#include <cstdio>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"

namespace vsentinel {

using nlohmann::json;

namespace {

constexpr PaperRow kPaperRows[] = {
    {"general", 0.777, 0.01, 0.936, 0.62},
    {"general,context", 0.803, 0.013, 0.937, 0.67},
    {"general,type,context", 0.813, 0.014, 0.940, 0.68},
    {"general,user", 0.927, 0.387, 0.985, 0.86},
    {"all", 0.941, 0.403, 0.982, 0.89},
};

std::string Fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

json CurveToJson(const std::vector<OperatingPoint>& curve) {
  json recall = json::array(), precision = json::array(), filter = json::array(),
       threshold = json::array();
  for (const OperatingPoint& p : curve) {
    recall.push_back(p.recall);
    precision.push_back(p.precision);
    filter.push_back(p.filter_rate);
    threshold.push_back(p.threshold);
  }
  return {{"recall", recall}, {"precision", precision}, {"filter_rate", filter},
          {"threshold", threshold}};
}

std::vector<OperatingPoint> CurveFromJson(const json& doc) {
  const json& recall = doc.at("recall");
  const json& precision = doc.at("precision");
  const json& filter = doc.at("filter_rate");
  const json& threshold = doc.at("threshold");
  if (precision.size() != recall.size() || filter.size() != recall.size() ||
      threshold.size() != recall.size()) {
    throw Error(ErrorCode::kMalformed, "curve arrays differ in length");
  }
  std::vector<OperatingPoint> curve(recall.size());
  for (size_t i = 0; i < curve.size(); ++i) {
    curve[i].recall = recall[i].get<double>();
    curve[i].precision = precision[i].get<double>();
    curve[i].filter_rate = filter[i].get<double>();
    curve[i].threshold = threshold[i].get<double>();
  }
  return curve;
}

json RowToJson(const ComboResult& r) {
  json doc = {{"groups", r.groups}};
  if (r.error) {
    doc["error"] = *r.error;
    return doc;
  }
  doc["roc_auc"] = r.roc_auc;
  doc["pr_auc"] = r.pr_auc;
  doc["target_recall"] = r.target_recall ? json(*r.target_recall) : json(nullptr);
  doc["filter_rate"] = r.op.filter_rate;
  doc["at_recall"] = r.op.achieved_recall;
  doc["threshold"] = r.op.threshold;
  doc["no_threshold"] = r.op.no_threshold;
  doc["n_train"] = r.n_train;
  doc["n_test"] = r.n_test;
  doc["test_positives"] = r.test_positives;
  doc["model_version"] = r.model_version;
  doc["params"] = r.params;
  doc["curve"] = CurveToJson(r.curve);
  return doc;
}

ComboResult RowFromJson(const json& doc) {
  ComboResult r;
  r.groups = doc.at("groups").get<std::string>();
  if (doc.contains("error")) {
    r.error = doc["error"].get<std::string>();
    return r;
  }
  r.roc_auc = doc.at("roc_auc").get<double>();
  r.pr_auc = doc.at("pr_auc").get<double>();
  if (!doc.at("target_recall").is_null()) r.target_recall = doc["target_recall"].get<double>();
  r.op.filter_rate = doc.at("filter_rate").get<double>();
  r.op.achieved_recall = doc.at("at_recall").get<double>();
  r.op.threshold = doc.at("threshold").get<double>();
  r.op.no_threshold = doc.at("no_threshold").get<bool>();
  r.n_train = doc.at("n_train").get<int64_t>();
  r.n_test = doc.at("n_test").get<int64_t>();
  r.test_positives = doc.at("test_positives").get<int64_t>();
  r.model_version = doc.at("model_version").get<std::string>();
  r.params = doc.at("params");
  r.curve = CurveFromJson(doc.at("curve"));
  return r;
}

}  // namespace

std::vector<GroupSet> DefaultCombos() {
  using G = FeatureGroup;
  return {{G::kGeneral},
          {G::kGeneral, G::kContext},
          {G::kGeneral, G::kType, G::kContext},
          {G::kGeneral, G::kUser},
          GroupSet::All()};
}

std::span<const PaperRow> PaperReference() { return kPaperRows; }

Dataset CorpusDataset(std::span<const CorpusRecord> records, GroupSet groups,
                      SplitAssignment split) {
  const std::vector<size_t> idx = FeatureIndices(groups);
  Dataset data;
  data.n_cols = idx.size();
  std::vector<double> row(idx.size());
  for (const CorpusRecord& r : records) {
    if (!r.features) continue;
    if (split != SplitAssignment::kUnassigned && r.split != split) continue;
    for (size_t j = 0; j < idx.size(); ++j) row[j] = (*r.features)[idx[j]];
    data.AddRow(row, r.EffectiveLabel());
  }
  return data;
}

const ComboResult* EvalReport::Find(std::string_view groups) const {
  std::string name(groups);
  try {
    name = GroupSet::Parse(groups).ToString();
  } catch (const Error&) {
  }
  for (const ComboResult& r : rows) {
    if (r.groups == name) return &r;
  }
  return nullptr;
}

json EvalReport::ToJson() const {
  json out = {{"schema", kReportSchemaVersion}, {"config", config}};
  json rows_json = json::array();
  for (const ComboResult& r : rows) rows_json.push_back(RowToJson(r));
  out["rows"] = rows_json;
  json paper = json::array();
  for (const PaperRow& p : kPaperRows) {
    paper.push_back({{"groups", p.groups},
                     {"roc_auc", p.roc_auc},
                     {"pr_auc", p.pr_auc},
                     {"filter_rate", p.filter_rate},
                     {"at_recall", p.at_recall}});
  }
  out["paper_reference"] = paper;
  return out;
}

EvalReport EvalReport::FromJson(const json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kSchemaMismatch, "unsupported report schema");
    }
    EvalReport report;
    report.config = doc.at("config");
    for (const json& r : doc.at("rows")) report.rows.push_back(RowFromJson(r));
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("bad report: ") + e.what());
  }
}

std::string EvalReport::ToTable() const {
  constexpr size_t kSource = 7;
  constexpr size_t kFeatures = 22;
  std::string out = Pad("source", kSource) + Pad("features", kFeatures) +
                    "ROC-AUC  PR-AUC  filter-rate\n";
  for (const ComboResult& r : rows) {
    out += Pad("desk", kSource) + Pad(r.groups, kFeatures);
    if (r.error) {
      out += "error: " + *r.error + "\n";
      continue;
    }
    out += Pad(Fixed(r.roc_auc, 3), 9) + Pad(Fixed(r.pr_auc, 3), 8) + Fixed(r.op.filter_rate, 3) +
           " at " + Fixed(r.op.achieved_recall, 2) + " recall";
    if (r.op.no_threshold) out += " (no threshold)";
    out += "\n";
  }
  for (const PaperRow& p : kPaperRows) {
    out += Pad("paper", kSource) + Pad(p.groups, kFeatures) + Pad(Fixed(p.roc_auc, 3), 9) +
           Pad(Fixed(p.pr_auc, 3), 8) + Fixed(p.filter_rate, 3) + " at " + Fixed(p.at_recall, 2) +
           " recall\n";
  }
  return out;
}

std::string CurveFileStem(std::string_view groups) {
  std::string stem(groups);
  for (char& c : stem) {
    if (c == ',') c = '_';
  }
  return stem;
}

std::string CurveCsv(std::span<const OperatingPoint> curve, bool filter_rate) {
  std::string out = filter_rate ? "recall,filter_rate\n" : "recall,precision\n";
  char buf[64];
  for (const OperatingPoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", p.recall,
                  filter_rate ? p.filter_rate : p.precision);
    out += buf;
  }
  return out;
}

std::vector<std::filesystem::path> EvalReport::WriteCurves(
    const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const ComboResult& r : rows) {
    if (r.error) continue;
    const std::string stem = CurveFileStem(r.groups);
    written.push_back(dir / (stem + "_precision.csv"));
    WriteFile(written.back(), CurveCsv(r.curve, false));
    written.push_back(dir / (stem + "_filter_rate.csv"));
    WriteFile(written.back(), CurveCsv(r.curve, true));
  }
  return written;
}

void EvalReport::Write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  WriteFile(dir / "report.json", ToJson().dump(1) + "\n");
  WriteFile(dir / "table.txt", ToTable());
  WriteCurves(dir / "curves");
}

EvalReport EvalReport::Read(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / "report.json";
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingReport, "no report at " + path.string());
  }
  json doc = json::parse(ReadFile(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kMalformed, "report is not JSON");
  return FromJson(doc);
}

void CheckModelMatchesCorpus(const TrainedModel& model, const Corpus& corpus) {
  if (model.feature_schema_version != corpus.feature_schema) {
    throw Error(ErrorCode::kSchemaMismatch, "model feature schema " +
                                                model.feature_schema_version +
                                                " but corpus has " + corpus.feature_schema);
  }
  if (model.feature_names != FeatureNames(GroupSet::Parse(model.summary.groups))) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model columns do not match groups " + model.summary.groups);
  }
}

ComboResult ScoreModel(const TrainedModel& model, std::span<const CorpusRecord> records,
                       std::optional<double> target_recall) {
  const GroupSet groups = GroupSet::Parse(model.summary.groups);
  const Dataset test = CorpusDataset(records, groups, SplitAssignment::kTest);
  if (test.n_rows() == 0) throw Error(ErrorCode::kEmptyInput, "corpus has no test split");
  std::vector<ScoredPair> pairs;
  pairs.reserve(test.n_rows());
  for (size_t i = 0; i < test.n_rows(); ++i) {
    pairs.push_back({model.PredictProba(test.row(i)), test.labels[i]});
  }
  const ScoredSet set(std::move(pairs));
  ComboResult r;
  r.groups = groups.ToString();
  r.roc_auc = RocAuc(set);
  r.pr_auc = PrAuc(set);
  r.target_recall = target_recall;
  r.op = target_recall ? FilterRateAtRecall(set, *target_recall) : DefaultOperatingPoint(set);
  r.n_train = model.summary.n;
  r.n_test = static_cast<int64_t>(set.size());
  r.test_positives = set.n_pos();
  r.model_version = model.Version();
  r.params = model.params.ToJson();
  r.curve = Curve(set);
  return r;
}

EvalReport RunAblation(const Corpus& corpus, const AblationOptions& options) {
  bool split = false;
  for (const CorpusRecord& r : corpus.records) split |= r.split != SplitAssignment::kUnassigned;
  if (!split) throw Error(ErrorCode::kInvalidArgument, "corpus has no train/test split");

  EvalReport report;
  json grid = json::array();
  for (const ForestParams& p : options.grid) grid.push_back(p.ToJson());
  report.config = {
      {"seed", options.seed},
      {"folds", options.folds},
      {"grid", grid},
      {"target_recall",
       options.target_recall ? json(*options.target_recall) : json("max recall with filter > 0")},
      {"pr_auc", "average precision, tied scores as one block"},
      {"group_mapping",
       "general: per-section change counts; context: typical vandalism patterns; "
       "type: typical non-vandalism edit kinds; user: editor characteristics"},
      {"feature_schema", corpus.feature_schema},
      {"corpus_summary", corpus.summary.ToJson()},
  };
  for (GroupSet groups : options.combos) {
    ComboResult row;
    row.groups = groups.ToString();
    try {
      const Dataset train = CorpusDataset(corpus.records, groups, SplitAssignment::kTrain);
      const GridSearchResult search =
          GridSearch(train, options.grid, options.folds, options.seed);
      TrainedModel model = Train(train, search.best, FeatureNames(groups), corpus.feature_schema);
      model.summary.groups = row.groups;
      row = ScoreModel(model, corpus.records, options.target_recall);
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace vsentinel
