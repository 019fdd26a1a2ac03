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

#ifndef VSENTINEL_METRICS_H_
#define VSENTINEL_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace vsentinel {

struct ScoredPair {
  double score = 0.0;
  bool label = false;
};

class ScoredSet {
 public:
  ScoredSet() = default;
  explicit ScoredSet(std::vector<ScoredPair> pairs);
  ScoredSet(std::span<const double> scores, std::span<const bool> labels);

  const std::vector<ScoredPair>& pairs() const { return pairs_; }
  int64_t n_pos() const { return n_pos_; }
  int64_t n_neg() const { return n_neg_; }
  size_t size() const { return pairs_.size(); }

 private:
  std::vector<ScoredPair> pairs_;
  int64_t n_pos_ = 0;
  int64_t n_neg_ = 0;
};

// Probability that a random positive outscores a random negative, ties 1/2.
// Throws Error(kOneClass).
double RocAuc(const ScoredSet& set);

// Average precision; equal scores enter as one block. Throws Error(kOneClass).
double PrAuc(const ScoredSet& set);

struct OperatingPoint {
  double threshold = 0.0;  // review everything with score >= threshold
  double recall = 0.0;
  double precision = 0.0;
  double filter_rate = 0.0;  // fraction of all edits with score < threshold

  double review_fraction() const { return 1.0 - filter_rate; }
};

struct FilterRateResult {
  double filter_rate = 0.0;
  double achieved_recall = 0.0;
  double threshold = 0.0;
  // Set when the target is only reached by reviewing every edit.
  bool no_threshold = false;

  double review_fraction() const { return 1.0 - filter_rate; }
};

// Largest threshold whose recall reaches target_recall, in (0, 1].
// Throws Error(kOneClass) or Error(kInvalidArgument).
FilterRateResult FilterRateAtRecall(const ScoredSet& set, double target_recall);

// One point per distinct score, thresholds descending, recall non-decreasing.
std::vector<OperatingPoint> Curve(const ScoredSet& set);

// Highest-recall point that still filters something; falls back to the
// top-threshold point when every cut reviews all edits.
FilterRateResult DefaultOperatingPoint(const ScoredSet& set);

}  // namespace vsentinel

#endif  // VSENTINEL_METRICS_H_
