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

#include <algorithm>

#include "vsentinel/error.h"

namespace vsentinel {

ScoredSet::ScoredSet(std::vector<ScoredPair> pairs) : pairs_(std::move(pairs)) {
  for (const ScoredPair& p : pairs_) (p.label ? n_pos_ : n_neg_)++;
}

ScoredSet::ScoredSet(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  }
  pairs_.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    pairs_.push_back({scores[i], labels[i]});
    (labels[i] ? n_pos_ : n_neg_)++;
  }
}

namespace {

void RequireBothClasses(const ScoredSet& set) {
  if (set.n_pos() == 0 || set.n_neg() == 0) {
    throw Error(ErrorCode::kOneClass, "need at least one positive and one negative");
  }
}

// Blocks of equal score in descending order: (positives, negatives, score).
struct Block {
  double score;
  int64_t pos;
  int64_t neg;
};

std::vector<Block> DescendingBlocks(const ScoredSet& set) {
  std::vector<ScoredPair> sorted = set.pairs();
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
  std::vector<Block> blocks;
  for (const ScoredPair& p : sorted) {
    if (blocks.empty() || blocks.back().score != p.score) blocks.push_back({p.score, 0, 0});
    (p.label ? blocks.back().pos : blocks.back().neg)++;
  }
  return blocks;
}

}  // namespace

double RocAuc(const ScoredSet& set) {
  RequireBothClasses(set);
  // Sum over blocks of positives x (negatives strictly below + half the tied ones).
  std::vector<Block> blocks = DescendingBlocks(set);
  double wins = 0.0;
  int64_t neg_below = set.n_neg();
  for (const Block& b : blocks) {
    neg_below -= b.neg;
    wins += static_cast<double>(b.pos) *
            (static_cast<double>(neg_below) + 0.5 * static_cast<double>(b.neg));
  }
  return wins / (static_cast<double>(set.n_pos()) * static_cast<double>(set.n_neg()));
}

double PrAuc(const ScoredSet& set) {
  RequireBothClasses(set);
  double ap = 0.0;
  int64_t tp = 0;
  int64_t seen = 0;
  for (const Block& b : DescendingBlocks(set)) {
    tp += b.pos;
    seen += b.pos + b.neg;
    if (b.pos == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += precision * static_cast<double>(b.pos) / static_cast<double>(set.n_pos());
  }
  return ap;
}

std::vector<OperatingPoint> Curve(const ScoredSet& set) {
  RequireBothClasses(set);
  std::vector<OperatingPoint> curve;
  const double n = static_cast<double>(set.size());
  int64_t tp = 0;
  int64_t seen = 0;
  for (const Block& b : DescendingBlocks(set)) {
    tp += b.pos;
    seen += b.pos + b.neg;
    OperatingPoint p;
    p.threshold = b.score;
    p.recall = static_cast<double>(tp) / static_cast<double>(set.n_pos());
    p.precision = static_cast<double>(tp) / static_cast<double>(seen);
    p.filter_rate = static_cast<double>(static_cast<int64_t>(set.size()) - seen) / n;
    curve.push_back(p);
  }
  return curve;
}

FilterRateResult FilterRateAtRecall(const ScoredSet& set, double target_recall) {
  if (!(target_recall > 0.0 && target_recall <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target recall must be in (0, 1]");
  }
  RequireBothClasses(set);
  const double n = static_cast<double>(set.size());
  int64_t tp = 0;
  int64_t seen = 0;
  for (const Block& b : DescendingBlocks(set)) {
    tp += b.pos;
    seen += b.pos + b.neg;
    const double recall = static_cast<double>(tp) / static_cast<double>(set.n_pos());
    if (recall >= target_recall) {
      FilterRateResult r;
      r.threshold = b.score;
      r.achieved_recall = recall;
      r.filter_rate = static_cast<double>(static_cast<int64_t>(set.size()) - seen) / n;
      r.no_threshold = r.filter_rate == 0.0;
      return r;
    }
  }
  FilterRateResult r;  // unreachable: the last block holds every positive
  r.no_threshold = true;
  return r;
}

FilterRateResult DefaultOperatingPoint(const ScoredSet& set) {
  const std::vector<OperatingPoint> curve = Curve(set);
  const OperatingPoint* best = &curve.front();
  for (const OperatingPoint& p : curve) {
    if (p.filter_rate > 0.0 && p.recall > best->recall) best = &p;
  }
  FilterRateResult r;
  r.threshold = best->threshold;
  r.achieved_recall = best->recall;
  r.filter_rate = best->filter_rate;
  r.no_threshold = r.filter_rate == 0.0;
  return r;
}

}  // namespace vsentinel
