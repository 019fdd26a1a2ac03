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

#include "vsentinel/metrics.h"

#include <cmath>

#include <gtest/gtest.h>

#include "support/generators.h"
#include "support/oracles.h"
#include "vsentinel/error.h"

namespace vsentinel {
namespace {

using testing::FilterRateOracle;
using testing::PrAucOracle;
using testing::RandomScoredSet;
using testing::RocAucOracle;

ScoredSet TenEdits() {
  return ScoredSet({{0.95, true}, {0.9, true}, {0.8, false}, {0.3, false}, {0.25, false},
                    {0.2, false}, {0.15, false}, {0.1, false}, {0.05, false}, {0.01, false}});
}

TEST(RocAucTest, HandExample) {
  ScoredSet s({{0.9, true}, {0.8, false}, {0.7, true}, {0.1, false}});
  EXPECT_DOUBLE_EQ(RocAuc(s), 0.75);
}

TEST(RocAucTest, SeparatedAndConstant) {
  EXPECT_DOUBLE_EQ(RocAuc(ScoredSet({{0.9, true}, {0.8, true}, {0.1, false}})), 1.0);
  EXPECT_DOUBLE_EQ(RocAuc(ScoredSet({{0.4, true}, {0.4, false}, {0.4, false}})), 0.5);
}

TEST(RocAucTest, OneClassThrows) {
  try {
    RocAuc(ScoredSet({{0.4, true}, {0.2, true}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOneClass);
  }
  EXPECT_THROW(PrAuc(ScoredSet({{0.4, false}})), Error);
  EXPECT_THROW(FilterRateAtRecall(ScoredSet({{0.4, false}}), 0.5), Error);
}

TEST(PrAucTest, HandStepSum) {
  ScoredSet s({{0.9, true}, {0.8, false}, {0.7, true}, {0.6, false}});
  EXPECT_NEAR(PrAuc(s), 1.0 * 0.5 + (2.0 / 3.0) * 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(PrAuc(ScoredSet({{0.9, true}, {0.1, false}})), 1.0);
}

TEST(PrAucTest, TiedBlockCountsOnce) {
  // One block of 2 positives and 2 negatives: precision 0.5 over all recall.
  ScoredSet s({{0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}});
  EXPECT_DOUBLE_EQ(PrAuc(s), 0.5);
}

TEST(PrAucTest, RandomScoresApproachPrevalence) {
  Rng rng(7);
  std::vector<ScoredPair> pairs;
  int pos = 0;
  for (int i = 0; i < 10000; ++i) {
    const bool label = rng.Bernoulli(0.1);
    pos += label;
    pairs.push_back({rng.Uniform(), label});
  }
  const double prevalence = pos / 10000.0;
  EXPECT_NEAR(PrAuc(ScoredSet(pairs)), prevalence, 0.05);
}

TEST(MetricsPropertyTest, MatchOraclesOnRandomSets) {
  Rng rng(20151);
  for (int trial = 0; trial < 500; ++trial) {
    const ScoredSet s = RandomScoredSet(rng, 50);
    ASSERT_NEAR(RocAuc(s), RocAucOracle(s), 1e-12) << "trial " << trial;
    ASSERT_NEAR(PrAuc(s), PrAucOracle(s), 1e-12) << "trial " << trial;
    for (double target : {0.1, 0.5, 0.85, 1.0}) {
      const FilterRateResult got = FilterRateAtRecall(s, target);
      const FilterRateResult want = FilterRateOracle(s, target);
      ASSERT_EQ(got.threshold, want.threshold);
      ASSERT_EQ(got.filter_rate, want.filter_rate);
      ASSERT_EQ(got.achieved_recall, want.achieved_recall);
      ASSERT_EQ(got.no_threshold, want.no_threshold);
    }
  }
}

TEST(FilterRateTest, WorkedTenEditExample) {
  const ScoredSet s = TenEdits();
  FilterRateResult full = FilterRateAtRecall(s, 1.0);
  EXPECT_EQ(full.filter_rate, 0.8);
  EXPECT_EQ(full.achieved_recall, 1.0);
  EXPECT_EQ(full.threshold, 0.9);
  EXPECT_FALSE(full.no_threshold);
  FilterRateResult half = FilterRateAtRecall(s, 0.5);
  EXPECT_EQ(half.filter_rate, 0.9);
  EXPECT_EQ(half.achieved_recall, 0.5);
  EXPECT_EQ(half.threshold, 0.95);
}

TEST(FilterRateTest, ConstantScoresFlagZeroFilterRate) {
  ScoredSet s({{0.3, true}, {0.3, false}, {0.3, true}, {0.3, false}});
  FilterRateResult r = FilterRateAtRecall(s, 0.75);
  EXPECT_TRUE(r.no_threshold);
  EXPECT_EQ(r.filter_rate, 0.0);
}

TEST(FilterRateTest, RejectsBadTarget) {
  EXPECT_THROW(FilterRateAtRecall(TenEdits(), 0.0), Error);
  EXPECT_THROW(FilterRateAtRecall(TenEdits(), 1.5), Error);
}

TEST(MetricsPropertyTest, FilterRateNonIncreasingInRecall) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const ScoredSet s = RandomScoredSet(rng, 60);
    double last = 2.0;
    for (int k = 1; k <= 20; ++k) {
      const FilterRateResult r = FilterRateAtRecall(s, k / 20.0);
      ASSERT_LE(r.filter_rate, last);
      ASSERT_EQ(r.review_fraction() + r.filter_rate, 1.0);
      last = r.filter_rate;
    }
  }
}

TEST(MetricsPropertyTest, MonotoneTransformInvariance) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ScoredSet s = RandomScoredSet(rng, 40);
    std::vector<ScoredPair> warped = s.pairs();
    for (ScoredPair& p : warped) p.score = std::pow(p.score, 3.0) * 0.5 + 0.1;
    const ScoredSet w(warped);
    ASSERT_DOUBLE_EQ(RocAuc(s), RocAuc(w));
    const FilterRateResult a = FilterRateAtRecall(s, 0.8);
    const FilterRateResult b = FilterRateAtRecall(w, 0.8);
    ASSERT_EQ(a.filter_rate, b.filter_rate);
    ASSERT_EQ(a.achieved_recall, b.achieved_recall);
    ASSERT_DOUBLE_EQ(std::pow(a.threshold, 3.0) * 0.5 + 0.1, b.threshold);
  }
}

TEST(CurveTest, MonotoneAndBounded) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<OperatingPoint> curve = Curve(RandomScoredSet(rng, 50));
    ASSERT_FALSE(curve.empty());
    EXPECT_EQ(curve.back().recall, 1.0);
    EXPECT_EQ(curve.back().filter_rate, 0.0);
    for (size_t i = 0; i < curve.size(); ++i) {
      EXPECT_GE(curve[i].precision, 0.0);
      EXPECT_LE(curve[i].precision, 1.0);
      if (i > 0) {
        EXPECT_GE(curve[i].recall, curve[i - 1].recall);
        EXPECT_LT(curve[i].threshold, curve[i - 1].threshold);
        EXPECT_LE(curve[i].filter_rate, curve[i - 1].filter_rate);
      }
    }
  }
}

TEST(DefaultOperatingPointTest, PicksMaxRecallWithNonzeroFilterRate) {
  const FilterRateResult r = DefaultOperatingPoint(TenEdits());
  // Recall 1 is reached at 0.9 while 8 edits are still below.
  EXPECT_EQ(r.achieved_recall, 1.0);
  EXPECT_EQ(r.filter_rate, 0.8);
  ScoredSet flat({{0.3, true}, {0.3, false}});
  EXPECT_TRUE(DefaultOperatingPoint(flat).no_threshold);
}

}  // namespace
}  // namespace vsentinel
