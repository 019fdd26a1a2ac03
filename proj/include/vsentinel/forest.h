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

#ifndef VSENTINEL_FOREST_H_
#define VSENTINEL_FOREST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace vsentinel {

inline constexpr int kModelFormatVersion = 1;

enum class FeaturesPerSplit { kSqrt, kLog2, kAll };
enum class ClassWeight { kNone, kBalanced };

struct ForestParams {
  int n_trees = 80;
  int max_depth = 0;  // 0 means unlimited
  int min_samples_leaf = 1;
  FeaturesPerSplit features_per_split = FeaturesPerSplit::kSqrt;
  ClassWeight class_weight = ClassWeight::kBalanced;
  uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static ForestParams FromJson(const nlohmann::json& doc);
  size_t FeaturesAt(size_t n_features) const;
  bool operator==(const ForestParams&) const = default;
};

// Row-major feature matrix.
struct Dataset {
  size_t n_cols = 0;
  std::vector<double> values;
  std::vector<bool> labels;

  size_t n_rows() const { return labels.size(); }
  std::span<const double> row(size_t i) const {
    return {values.data() + i * n_cols, n_cols};
  }
  void AddRow(std::span<const double> x, bool label);
};

struct TreeNode {
  int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int32_t left = -1;
  int32_t right = -1;
  double weight_true = 0.0;  // leaves only
  double weight_false = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  bool operator==(const DecisionTree&) const = default;
};

struct TrainingSummary {
  int64_t n = 0;
  double prevalence = 0.0;
  std::string groups;  // feature groups the columns came from, if any

  bool operator==(const TrainingSummary&) const = default;
};

class TrainedModel {
 public:
  ForestParams params;
  std::string feature_schema_version;
  std::vector<std::string> feature_names;
  std::vector<DecisionTree> trees;
  TrainingSummary summary;
  int format_version = kModelFormatVersion;

  // Mean of the per-tree weighted vote fractions. Throws Error(kSchemaMismatch)
  // when x does not have one value per feature name.
  double PredictProba(std::span<const double> x) const;

  // Canonical JSON; identical models give identical bytes.
  std::string Serialize() const;
  // Throws Error(kMalformed) or Error(kSchemaMismatch).
  static TrainedModel Parse(std::string_view text);
  void Save(const std::filesystem::path& path) const;
  static TrainedModel Load(const std::filesystem::path& path);
  // Content hash prefix of the serialized model.
  std::string Version() const;
};

// Throws Error(kEmptyInput) or Error(kSingleClass).
TrainedModel Train(const Dataset& data, const ForestParams& params,
                   std::vector<std::string> feature_names,
                   std::string feature_schema_version = "");

struct GridCellFold {
  size_t cell = 0;
  int fold = 0;
  std::optional<double> pr_auc;  // absent when the fold was skipped
  std::string note;
};

struct GridSearchResult {
  ForestParams best;
  size_t best_cell = 0;
  std::vector<double> mean_pr_auc;  // per cell, over scored folds; -1 if none
  std::vector<GridCellFold> folds;  // |grid| x folds rows
};

// Stratified k-fold cross validation; ties prefer fewer trees, then the
// shallower depth limit.
// A single-cell grid is returned without cross-validation.
GridSearchResult GridSearch(const Dataset& data, std::span<const ForestParams> grid,
                            int folds, uint64_t seed);

// A grid file is a JSON object {"cells": [params, ...]} or a list of
// per-key value lists {"n_trees": [40, 80], "max_depth": [0, 12], ...}
// expanded as a cartesian product over the defaults.
std::vector<ForestParams> ParseParamsGrid(std::string_view text);

}  // namespace vsentinel

#endif  // VSENTINEL_FOREST_H_
