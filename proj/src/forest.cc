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

#include "vsentinel/forest.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

#include "vsentinel/error.h"
#include "vsentinel/file_util.h"
#include "vsentinel/metrics.h"
#include "vsentinel/random.h"

namespace vsentinel {

using nlohmann::json;

namespace {

const char* FeaturesPerSplitName(FeaturesPerSplit f) {
  switch (f) {
    case FeaturesPerSplit::kSqrt: return "sqrt";
    case FeaturesPerSplit::kLog2: return "log2";
    case FeaturesPerSplit::kAll: return "all";
  }
  return "sqrt";
}

FeaturesPerSplit ParseFeaturesPerSplit(const std::string& s) {
  if (s == "sqrt") return FeaturesPerSplit::kSqrt;
  if (s == "log2") return FeaturesPerSplit::kLog2;
  if (s == "all") return FeaturesPerSplit::kAll;
  throw Error(ErrorCode::kConfig, "features_per_split must be sqrt, log2 or all");
}

ClassWeight ParseClassWeight(const std::string& s) {
  if (s == "balanced") return ClassWeight::kBalanced;
  if (s == "none") return ClassWeight::kNone;
  throw Error(ErrorCode::kConfig, "class_weight must be balanced or none");
}

}  // namespace

void ForestParams::Validate() const {
  if (n_trees < 1) throw Error(ErrorCode::kConfig, "n_trees must be >= 1");
  if (min_samples_leaf < 1) throw Error(ErrorCode::kConfig, "min_samples_leaf must be >= 1");
  if (max_depth < 0) throw Error(ErrorCode::kConfig, "max_depth must be >= 0");
}

json ForestParams::ToJson() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth == 0 ? json(nullptr) : json(max_depth)},
          {"min_samples_leaf", min_samples_leaf},
          {"features_per_split", FeaturesPerSplitName(features_per_split)},
          {"class_weight", class_weight == ClassWeight::kBalanced ? "balanced" : "none"},
          {"seed", seed}};
}

ForestParams ForestParams::FromJson(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "forest params must be an object");
  ForestParams p;
  try {
    if (doc.contains("n_trees")) p.n_trees = doc["n_trees"].get<int>();
    if (doc.contains("max_depth")) {
      p.max_depth = doc["max_depth"].is_null() ? 0 : doc["max_depth"].get<int>();
    }
    if (doc.contains("min_samples_leaf")) p.min_samples_leaf = doc["min_samples_leaf"].get<int>();
    if (doc.contains("features_per_split")) {
      p.features_per_split = ParseFeaturesPerSplit(doc["features_per_split"].get<std::string>());
    }
    if (doc.contains("class_weight")) {
      p.class_weight = ParseClassWeight(doc["class_weight"].get<std::string>());
    }
    if (doc.contains("seed")) p.seed = doc["seed"].get<uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  p.Validate();
  return p;
}

size_t ForestParams::FeaturesAt(size_t n_features) const {
  const double n = static_cast<double>(n_features);
  size_t k = n_features;
  switch (features_per_split) {
    case FeaturesPerSplit::kSqrt: k = static_cast<size_t>(std::floor(std::sqrt(n))); break;
    case FeaturesPerSplit::kLog2: k = static_cast<size_t>(std::floor(std::log2(n))); break;
    case FeaturesPerSplit::kAll: break;
  }
  return std::clamp<size_t>(k, 1, std::max<size_t>(1, n_features));
}

void Dataset::AddRow(std::span<const double> x, bool label) {
  if (n_cols == 0 && labels.empty()) n_cols = x.size();
  if (x.size() != n_cols) {
    throw Error(ErrorCode::kSchemaMismatch, "row has " + std::to_string(x.size()) +
                                                " values, expected " + std::to_string(n_cols));
  }
  values.insert(values.end(), x.begin(), x.end());
  labels.push_back(label);
}

double DecisionTree::Predict(std::span<const double> x) const {
  int32_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  const TreeNode& leaf = nodes[i];
  const double total = leaf.weight_true + leaf.weight_false;
  return total > 0.0 ? leaf.weight_true / total : 0.0;
}

double TrainedModel::PredictProba(std::span<const double> x) const {
  if (x.size() != feature_names.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "got " + std::to_string(x.size()) +
                                                " features, model expects " +
                                                std::to_string(feature_names.size()));
  }
  double sum = 0.0;
  for (const DecisionTree& tree : trees) sum += tree.Predict(x);
  return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
}

namespace {

// Column-major copy of the training rows in canonical order.
struct Columns {
  size_t n_rows = 0;
  std::vector<std::vector<double>> cols;
  std::vector<uint8_t> labels;
};

Columns Canonicalize(const Dataset& data) {
  std::vector<uint32_t> order(data.n_rows());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    auto ra = data.row(a);
    auto rb = data.row(b);
    for (size_t j = 0; j < data.n_cols; ++j) {
      if (ra[j] != rb[j]) return ra[j] < rb[j];
    }
    return data.labels[a] < data.labels[b];
  });
  Columns c;
  c.n_rows = order.size();
  c.cols.assign(data.n_cols, std::vector<double>(order.size()));
  c.labels.resize(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    auto r = data.row(order[i]);
    for (size_t j = 0; j < data.n_cols; ++j) c.cols[j][i] = r[j];
    c.labels[i] = data.labels[order[i]] ? 1 : 0;
  }
  return c;
}

class TreeBuilder {
 public:
  TreeBuilder(const Columns& x, const ForestParams& params, const double class_weight[2])
      : x_(x), params_(params), mtry_(params.FeaturesAt(x.cols.size())) {
    weight_[0] = class_weight[0];
    weight_[1] = class_weight[1];
    scratch_.reserve(x.n_rows);
  }

  DecisionTree Build(uint64_t seed) {
    Rng rng(seed);
    std::vector<uint32_t> count(x_.n_rows, 0);
    for (size_t i = 0; i < x_.n_rows; ++i) ++count[rng.Below(x_.n_rows)];
    rows_.clear();
    count_.clear();
    for (uint32_t i = 0; i < x_.n_rows; ++i) {
      if (count[i] > 0) {
        rows_.push_back(i);
        count_.push_back(count[i]);
      }
    }
    row_count_.assign(x_.n_rows, 0);
    for (size_t k = 0; k < rows_.size(); ++k) row_count_[rows_[k]] = count_[k];

    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Work {
      int32_t node;
      size_t begin;
      size_t end;
      int depth;
    };
    std::vector<Work> stack = {{0, 0, rows_.size(), 0}};
    std::vector<size_t> features(x_.cols.size());
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      double wt = 0.0;
      double wf = 0.0;
      int64_t n = 0;
      for (size_t k = w.begin; k < w.end; ++k) {
        const uint32_t r = rows_[k];
        const double cw = row_count_[r] * weight_[x_.labels[r]];
        (x_.labels[r] ? wt : wf) += cw;
        n += row_count_[r];
      }
      const bool stop = wt == 0.0 || wf == 0.0 ||
                        (params_.max_depth > 0 && w.depth >= params_.max_depth) ||
                        n < 2 * static_cast<int64_t>(params_.min_samples_leaf);
      Split split;
      if (!stop) {
        std::iota(features.begin(), features.end(), size_t{0});
        for (size_t k = 0; k < features.size(); ++k) {
          std::swap(features[k], features[k + rng.Below(features.size() - k)]);
          Consider(features[k], w.begin, w.end, wt, wf, n, split);
          if (k + 1 >= mtry_ && split.feature >= 0) break;
        }
      }
      if (split.feature < 0) {
        tree.nodes[w.node].weight_true = wt;
        tree.nodes[w.node].weight_false = wf;
        continue;
      }
      const auto& col = x_.cols[split.feature];
      auto mid = std::partition(rows_.begin() + static_cast<ptrdiff_t>(w.begin),
                                rows_.begin() + static_cast<ptrdiff_t>(w.end),
                                [&](uint32_t r) { return col[r] <= split.threshold; });
      const size_t cut = static_cast<size_t>(mid - rows_.begin());
      const auto left = static_cast<int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[w.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, cut, w.end, w.depth + 1});
      stack.push_back({left, w.begin, cut, w.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    int32_t feature = -1;
    double threshold = 0.0;
    double score = -1.0;
  };

  void Consider(size_t f, size_t begin, size_t end, double wt, double wf, int64_t n,
                Split& best) {
    const auto& col = x_.cols[f];
    scratch_.clear();
    for (size_t k = begin; k < end; ++k) scratch_.push_back({col[rows_[k]], rows_[k]});
    std::sort(scratch_.begin(), scratch_.end());
    if (scratch_.front().first == scratch_.back().first) return;
    const int64_t min_leaf = params_.min_samples_leaf;
    double lt = 0.0;
    double lf = 0.0;
    int64_t ln = 0;
    for (size_t i = 0; i + 1 < scratch_.size(); ++i) {
      const uint32_t r = scratch_[i].second;
      const double cw = row_count_[r] * weight_[x_.labels[r]];
      (x_.labels[r] ? lt : lf) += cw;
      ln += row_count_[r];
      const double v = scratch_[i].first;
      const double next = scratch_[i + 1].first;
      if (v == next) continue;
      if (ln < min_leaf) continue;
      if (n - ln < min_leaf) break;
      const double rt = wt - lt;
      const double rf = wf - lf;
      // Maximizing this is equivalent to minimizing weighted Gini impurity.
      const double score = (lt * lt + lf * lf) / (lt + lf) + (rt * rt + rf * rf) / (rt + rf);
      if (score > best.score) {
        double threshold = v + (next - v) / 2.0;
        if (!(threshold < next)) threshold = v;
        best = {static_cast<int32_t>(f), threshold, score};
      }
    }
  }

  const Columns& x_;
  const ForestParams& params_;
  size_t mtry_;
  double weight_[2];
  std::vector<uint32_t> rows_;
  std::vector<uint32_t> count_;
  std::vector<uint32_t> row_count_;
  std::vector<std::pair<double, uint32_t>> scratch_;
};

}  // namespace

TrainedModel Train(const Dataset& data, const ForestParams& params,
                   std::vector<std::string> feature_names,
                   std::string feature_schema_version) {
  params.Validate();
  if (data.n_rows() == 0 || data.n_cols == 0) {
    throw Error(ErrorCode::kEmptyInput, "no training rows");
  }
  if (feature_names.size() != data.n_cols) {
    throw Error(ErrorCode::kSchemaMismatch, "feature names do not match the matrix width");
  }
  const auto n_pos = static_cast<int64_t>(std::count(data.labels.begin(), data.labels.end(), true));
  const auto n = static_cast<int64_t>(data.n_rows());
  if (n_pos == 0 || n_pos == n) {
    throw Error(ErrorCode::kSingleClass, "training labels are all " +
                                             std::string(n_pos == 0 ? "false" : "true"));
  }
  double class_weight[2] = {1.0, 1.0};
  if (params.class_weight == ClassWeight::kBalanced) {
    class_weight[0] = static_cast<double>(n) / (2.0 * static_cast<double>(n - n_pos));
    class_weight[1] = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
  }
  const Columns columns = Canonicalize(data);
  TrainedModel model;
  model.params = params;
  model.feature_schema_version = std::move(feature_schema_version);
  model.feature_names = std::move(feature_names);
  model.summary.n = n;
  model.summary.prevalence = static_cast<double>(n_pos) / static_cast<double>(n);
  TreeBuilder builder(columns, params, class_weight);
  model.trees.reserve(static_cast<size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    model.trees.push_back(builder.Build(DeriveSeed(params.seed, static_cast<uint64_t>(t))));
  }
  return model;
}

std::string TrainedModel::Serialize() const {
  json trees_doc = json::array();
  for (const DecisionTree& tree : trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), wt = json::array(), wf = json::array();
    for (const TreeNode& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      wt.push_back(n.weight_true);
      wf.push_back(n.weight_false);
    }
    trees_doc.push_back({{"feature", feature},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"weight_true", wt},
                         {"weight_false", wf}});
  }
  json doc = {{"format_version", format_version},
              {"feature_schema_version", feature_schema_version},
              {"params", params.ToJson()},
              {"feature_names", feature_names},
              {"summary",
               {{"n", summary.n}, {"prevalence", summary.prevalence}, {"groups", summary.groups}}},
              {"trees", trees_doc}};
  return doc.dump() + "\n";
}

TrainedModel TrainedModel::Parse(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_object()) throw Error(ErrorCode::kMalformed, "model is not a JSON object");
  TrainedModel m;
  try {
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kModelFormatVersion) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "unsupported model format " + std::to_string(m.format_version));
    }
    m.feature_schema_version = doc.at("feature_schema_version").get<std::string>();
    m.params = ForestParams::FromJson(doc.at("params"));
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const json& s = doc.at("summary");
    m.summary.n = s.at("n").get<int64_t>();
    m.summary.prevalence = s.at("prevalence").get<double>();
    m.summary.groups = s.at("groups").get<std::string>();
    const auto n_features = static_cast<int32_t>(m.feature_names.size());
    for (const json& t : doc.at("trees")) {
      DecisionTree tree;
      const auto& feature = t.at("feature");
      const size_t size = feature.size();
      for (const char* key : {"threshold", "left", "right", "weight_true", "weight_false"}) {
        if (t.at(key).size() != size) throw Error(ErrorCode::kMalformed, "ragged tree arrays");
      }
      tree.nodes.resize(size);
      for (size_t i = 0; i < size; ++i) {
        TreeNode& n = tree.nodes[i];
        n.feature = feature[i].get<int32_t>();
        n.threshold = t["threshold"][i].get<double>();
        n.left = t["left"][i].get<int32_t>();
        n.right = t["right"][i].get<int32_t>();
        n.weight_true = t["weight_true"][i].get<double>();
        n.weight_false = t["weight_false"][i].get<double>();
        if (n.feature >= n_features) {
          throw Error(ErrorCode::kSchemaMismatch, "tree uses feature index " +
                                                      std::to_string(n.feature));
        }
        const auto sz = static_cast<int32_t>(size);
        if (n.feature >= 0 && (n.left <= static_cast<int32_t>(i) || n.left >= sz ||
                               n.right <= static_cast<int32_t>(i) || n.right >= sz)) {
          throw Error(ErrorCode::kMalformed, "bad child index");
        }
      }
      if (size == 0) throw Error(ErrorCode::kMalformed, "empty tree");
      m.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformed, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw Error(ErrorCode::kMalformed, e.message(), e.path());
    throw;
  }
  return m;
}

void TrainedModel::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize());
}

TrainedModel TrainedModel::Load(const std::filesystem::path& path) {
  try {
    return Parse(ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path.string());
  }
}

std::string TrainedModel::Version() const { return Sha1Hex(Serialize()).substr(0, 12); }

GridSearchResult GridSearch(const Dataset& data, std::span<const ForestParams> grid,
                            int folds, uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::kConfig, "empty parameter grid");
  if (folds < 2) throw Error(ErrorCode::kConfig, "need at least 2 folds");
  if (grid.size() == 1) {
    GridSearchResult only;
    only.best = grid[0];
    only.mean_pr_auc = {-1.0};
    for (int f = 0; f < folds; ++f) only.folds.push_back({0, f, std::nullopt, "single cell"});
    return only;
  }
  // Stratified assignment: each class is shuffled and dealt round robin.
  std::vector<int> fold_of(data.n_rows());
  Rng rng(DeriveSeed(seed, 3));
  for (bool cls : {true, false}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < data.n_rows(); ++i) {
      if (data.labels[i] == cls) idx.push_back(i);
    }
    rng.Shuffle(std::span(idx));
    for (size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = static_cast<int>(k % folds);
  }
  std::vector<std::string> names(data.n_cols);
  for (size_t j = 0; j < data.n_cols; ++j) names[j] = "f" + std::to_string(j);

  GridSearchResult result;
  for (size_t c = 0; c < grid.size(); ++c) {
    double sum = 0.0;
    int scored = 0;
    for (int f = 0; f < folds; ++f) {
      Dataset train;
      train.n_cols = data.n_cols;
      std::vector<size_t> held_out;
      for (size_t i = 0; i < data.n_rows(); ++i) {
        if (fold_of[i] == f) {
          held_out.push_back(i);
        } else {
          train.AddRow(data.row(i), data.labels[i]);
        }
      }
      GridCellFold row{c, f, std::nullopt, ""};
      try {
        const TrainedModel model = Train(train, grid[c], names);
        std::vector<ScoredPair> pairs;
        for (size_t i : held_out) pairs.push_back({model.PredictProba(data.row(i)), data.labels[i]});
        row.pr_auc = PrAuc(ScoredSet(std::move(pairs)));
        sum += *row.pr_auc;
        ++scored;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingleClass && e.code() != ErrorCode::kOneClass &&
            e.code() != ErrorCode::kEmptyInput) {
          throw;
        }
        row.note = std::string("skipped: ") + ErrorCodeName(e.code());
      }
      result.folds.push_back(std::move(row));
    }
    result.mean_pr_auc.push_back(scored ? sum / scored : -1.0);
  }
  auto depth_key = [](const ForestParams& p) { return p.max_depth == 0 ? INT_MAX : p.max_depth; };
  size_t best = 0;
  for (size_t c = 1; c < grid.size(); ++c) {
    const double a = result.mean_pr_auc[c];
    const double b = result.mean_pr_auc[best];
    if (a > b || (a == b && (grid[c].n_trees < grid[best].n_trees ||
                             (grid[c].n_trees == grid[best].n_trees &&
                              depth_key(grid[c]) < depth_key(grid[best]))))) {
      best = c;
    }
  }
  result.best_cell = best;
  result.best = grid[best];
  return result;
}

std::vector<ForestParams> ParseParamsGrid(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "grid file must be a JSON object");
  std::vector<ForestParams> cells;
  if (doc.contains("cells")) {
    if (!doc["cells"].is_array()) throw Error(ErrorCode::kConfig, "cells must be a list");
    for (const json& c : doc["cells"]) cells.push_back(ForestParams::FromJson(c));
  } else {
    std::vector<json> partial = {json::object()};
    for (const char* key : {"n_trees", "max_depth", "min_samples_leaf", "features_per_split",
                            "class_weight", "seed"}) {
      if (!doc.contains(key)) continue;
      const json values = doc[key].is_array() ? doc[key] : json::array({doc[key]});
      if (values.empty()) throw Error(ErrorCode::kConfig, std::string(key) + " is empty");
      std::vector<json> next;
      for (const json& base : partial) {
        for (const json& v : values) {
          json cell = base;
          cell[key] = v;
          next.push_back(std::move(cell));
        }
      }
      partial = std::move(next);
    }
    for (const json& c : partial) cells.push_back(ForestParams::FromJson(c));
  }
  if (cells.empty()) throw Error(ErrorCode::kConfig, "grid has no cells");
  return cells;
}

}  // namespace vsentinel
