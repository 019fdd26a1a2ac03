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

#include <gtest/gtest.h>

#include "support/temp_dir.h"
#include "vsentinel/error.h"
#include "vsentinel/metrics.h"
#include "vsentinel/random.h"

namespace vsentinel {
namespace {

std::vector<std::string> Names(size_t n) {
  std::vector<std::string> names;
  for (size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

// Column 0 carries the class with strength `signal` (0 = pure noise); the
// other columns are noise.
Dataset Make(Rng& rng, size_t n, size_t cols, double prevalence, double signal) {
  Dataset d;
  d.n_cols = cols;
  std::vector<double> x(cols);
  for (size_t i = 0; i < n; ++i) {
    const bool y = rng.Bernoulli(prevalence);
    for (double& v : x) v = rng.Uniform();
    x[0] = signal * (y ? 1.0 : 0.0) + rng.Normal(0.0, 1.0);
    d.AddRow(x, y);
  }
  return d;
}

double HeldOutRoc(const TrainedModel& m, const Dataset& test) {
  std::vector<ScoredPair> pairs;
  for (size_t i = 0; i < test.n_rows(); ++i) {
    pairs.push_back({m.PredictProba(test.row(i)), test.labels[i]});
  }
  return RocAuc(ScoredSet(std::move(pairs)));
}

int Depth(const DecisionTree& t, int32_t node = 0) {
  const TreeNode& n = t.nodes[node];
  if (n.feature < 0) return 0;
  return 1 + std::max(Depth(t, n.left), Depth(t, n.right));
}

TEST(ForestTest, DisjointSupportIsSeparated) {
  Rng rng(1);
  auto disjoint = [&](size_t n) {
    Dataset d;
    d.n_cols = 4;
    for (size_t i = 0; i < n; ++i) {
      const bool y = i % 5 == 0;
      std::vector<double> x = {y ? 1.0 + rng.Uniform() : rng.Uniform() * 0.9, rng.Uniform(),
                               rng.Uniform(), rng.Uniform()};
      d.AddRow(x, y);
    }
    return d;
  };
  ForestParams p;
  p.seed = 3;
  const TrainedModel m = Train(disjoint(800), p, Names(4));
  EXPECT_GE(HeldOutRoc(m, disjoint(2000)), 0.999);
}

TEST(ForestTest, SignalBeatsNoise) {
  Rng rng(2);
  ForestParams p;
  p.min_samples_leaf = 5;
  p.seed = 1;
  const Dataset train = Make(rng, 3000, 6, 0.2, 2.5);
  const Dataset test = Make(rng, 3000, 6, 0.2, 2.5);
  EXPECT_GT(HeldOutRoc(Train(train, p, Names(6)), test), 0.9);

  const Dataset noise_train = Make(rng, 3000, 6, 0.2, 0.0);
  const Dataset noise_test = Make(rng, 3000, 6, 0.2, 0.0);
  EXPECT_NEAR(HeldOutRoc(Train(noise_train, p, Names(6)), noise_test), 0.5, 0.05);
}

TEST(ForestTest, InputErrors) {
  Dataset empty;
  empty.n_cols = 2;
  try {
    Train(empty, {}, Names(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  Dataset one;
  one.n_cols = 2;
  for (int i = 0; i < 20; ++i) one.AddRow(std::vector<double>{double(i), 1.0}, false);
  try {
    Train(one, {}, Names(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
  ForestParams bad;
  bad.n_trees = 0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = {};
  bad.min_samples_leaf = 0;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(ForestTest, DeterministicPerSeed) {
  Rng rng(4);
  const Dataset d = Make(rng, 600, 5, 0.3, 1.5);
  ForestParams p;
  p.n_trees = 20;
  p.seed = 9;
  const std::string a = Train(d, p, Names(5)).Serialize();
  EXPECT_EQ(a, Train(d, p, Names(5)).Serialize());
  p.seed = 10;
  EXPECT_NE(a, Train(d, p, Names(5)).Serialize());
}

TEST(ForestTest, StructureRespectsParams) {
  Rng rng(5);
  const Dataset d = Make(rng, 1500, 5, 0.3, 1.0);
  ForestParams p;
  p.n_trees = 15;
  p.max_depth = 4;
  p.seed = 2;
  const TrainedModel m = Train(d, p, Names(5));
  ASSERT_EQ(m.trees.size(), 15u);
  for (const DecisionTree& t : m.trees) {
    EXPECT_LE(Depth(t), 4);
    for (const TreeNode& n : t.nodes) {
      if (n.feature >= 0) {
        EXPECT_LT(n.feature, 5);
        EXPECT_GT(n.left, 0);
        EXPECT_GT(n.right, 0);
      }
    }
  }
  for (size_t i = 0; i < 200; ++i) {
    const double s = m.PredictProba(d.row(i));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_EQ(m.summary.n, 1500);
  EXPECT_EQ(p.FeaturesAt(53), 7u);
  p.features_per_split = FeaturesPerSplit::kLog2;
  EXPECT_EQ(p.FeaturesAt(53), 5u);
  p.features_per_split = FeaturesPerSplit::kAll;
  EXPECT_EQ(p.FeaturesAt(53), 53u);
}

TEST(ForestTest, HandBuiltTree) {
  TrainedModel m;
  m.feature_names = {"a", "b"};
  DecisionTree t;
  t.nodes = {{0, 0.5, 1, 2, 0, 0}, {-1, 0, -1, -1, 3.0, 1.0}, {-1, 0, -1, -1, 0.0, 2.0}};
  m.trees = {t};
  const std::vector<double> low = {0.2, 9.0};
  const std::vector<double> edge = {0.5, 9.0};
  const std::vector<double> high = {0.7, 9.0};
  EXPECT_DOUBLE_EQ(m.PredictProba(low), 0.75);
  EXPECT_DOUBLE_EQ(m.PredictProba(edge), 0.75);
  EXPECT_DOUBLE_EQ(m.PredictProba(high), 0.0);
  DecisionTree always;
  always.nodes = {{-1, 0, -1, -1, 1.0, 0.0}};
  m.trees.push_back(always);
  EXPECT_DOUBLE_EQ(m.PredictProba(low), 0.875);
  const std::vector<double> wrong = {0.2};
  try {
    m.PredictProba(wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(ForestTest, SerializationRoundTripPredictsBitIdentically) {
  Rng rng(6);
  const Dataset d = Make(rng, 2000, 8, 0.1, 2.0);
  ForestParams p;
  p.n_trees = 30;
  p.seed = 5;
  const TrainedModel m = Train(d, p, Names(8), "vs-features/1");
  testing::TempDir dir;
  m.Save(dir / "model.json");
  const TrainedModel back = TrainedModel::Load(dir / "model.json");
  EXPECT_EQ(back.Serialize(), m.Serialize());
  EXPECT_EQ(back.Version(), m.Version());
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.feature_schema_version, "vs-features/1");
  std::vector<double> x(8);
  for (int i = 0; i < 10000; ++i) {
    for (double& v : x) v = rng.Normal(0.5, 2.0);
    ASSERT_EQ(back.PredictProba(x), m.PredictProba(x)) << i;
  }
}

TEST(ForestTest, ParseRejectsBadModels) {
  try {
    TrainedModel::Parse("{\"trees\": 3}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformed);
  }
  EXPECT_THROW(TrainedModel::Parse("not json"), Error);
}

TEST(GridSearchTest, SingleCellSkipsCrossValidation) {
  Rng rng(7);
  const Dataset d = Make(rng, 300, 4, 0.3, 2.0);
  ForestParams only;
  only.n_trees = 7;
  const GridSearchResult r = GridSearch(d, std::vector<ForestParams>{only}, 5, 1);
  EXPECT_EQ(r.best, only);
  EXPECT_EQ(r.best_cell, 0u);
  ASSERT_EQ(r.folds.size(), 5u);
  for (const GridCellFold& f : r.folds) EXPECT_FALSE(f.pr_auc);
}

TEST(GridSearchTest, PicksBestMeanAndReportsEveryFold) {
  Rng rng(8);
  const Dataset d = Make(rng, 900, 4, 0.25, 2.0);
  std::vector<ForestParams> grid(3);
  grid[0].n_trees = 10;
  grid[0].max_depth = 1;
  grid[1].n_trees = 10;
  grid[1].max_depth = 6;
  grid[1].min_samples_leaf = 5;
  grid[2].n_trees = 1;
  grid[2].max_depth = 1;
  grid[2].features_per_split = FeaturesPerSplit::kAll;
  const GridSearchResult r = GridSearch(d, grid, 3, 4);
  ASSERT_EQ(r.mean_pr_auc.size(), 3u);
  EXPECT_EQ(r.folds.size(), 9u);
  for (const GridCellFold& f : r.folds) EXPECT_TRUE(f.pr_auc) << f.note;
  const size_t best =
      std::max_element(r.mean_pr_auc.begin(), r.mean_pr_auc.end()) - r.mean_pr_auc.begin();
  EXPECT_EQ(r.best_cell, best);
  EXPECT_EQ(r.best.n_trees, grid[best].n_trees);
  EXPECT_EQ(r.best.max_depth, grid[best].max_depth);
}

TEST(GridSearchTest, ParseGridForms) {
  const auto product = ParseParamsGrid(R"({"n_trees":[10,20],"max_depth":[0,4,8]})");
  ASSERT_EQ(product.size(), 6u);
  std::set<std::pair<int, int>> cells;
  for (const auto& p : product) {
    cells.insert({p.n_trees, p.max_depth});
    EXPECT_EQ(p.min_samples_leaf, ForestParams{}.min_samples_leaf);
  }
  EXPECT_EQ(cells.size(), 6u);
  const auto listed = ParseParamsGrid(R"({"cells":[{"n_trees":5},{"min_samples_leaf":10}]})");
  ASSERT_EQ(listed.size(), 2u);
  EXPECT_EQ(listed[0].n_trees, 5);
  EXPECT_EQ(listed[1].min_samples_leaf, 10);
  EXPECT_EQ(listed[1].n_trees, ForestParams{}.n_trees);
  EXPECT_THROW(ParseParamsGrid("[1,2]"), Error);
  EXPECT_THROW(ParseParamsGrid(R"({"n_trees":[0]})"), Error);
}

TEST(ForestParamsTest, JsonRoundTrip) {
  ForestParams p;
  p.n_trees = 12;
  p.max_depth = 3;
  p.min_samples_leaf = 4;
  p.features_per_split = FeaturesPerSplit::kLog2;
  p.class_weight = ClassWeight::kNone;
  p.seed = 77;
  EXPECT_EQ(ForestParams::FromJson(p.ToJson()), p);
  EXPECT_EQ(ForestParams::FromJson(nlohmann::json::object()), ForestParams{});
}

}  // namespace
}  // namespace vsentinel
