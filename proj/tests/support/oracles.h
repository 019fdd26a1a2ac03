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

// Brute-force reference implementations used by the property tests and the
// acceptance harness.

#ifndef VSENTINEL_TESTS_SUPPORT_ORACLES_H_
#define VSENTINEL_TESTS_SUPPORT_ORACLES_H_

#include <span>
#include <string>

#include "vsentinel/corpus.h"
#include "vsentinel/diff.h"
#include "vsentinel/entity.h"
#include "vsentinel/metrics.h"

namespace vsentinel::testing {

// Fraction of (positive, negative) pairs ordered correctly, ties as 1/2.
double RocAucOracle(const ScoredSet& set);
// Sum over distinct cut points (descending) of precision * delta recall.
double PrAucOracle(const ScoredSet& set);
// Enumerates every distinct score as a threshold.
FilterRateResult FilterRateOracle(const ScoredSet& set, double target_recall);

// Element-wise set/multiset difference over independently serialized
// elements.
EntityDiff DiffOracle(const EntityRevision* parent, const EntityRevision& child,
                      const PropertyRegistry& registry);

// Compares every later hash in reach against every earlier hash.
bool RevertOracle(std::span<const HistoryEntry> history, size_t target,
                  const RevertConfig& cfg);

// Field-by-field description of the first mismatch, empty if equal.
std::string DescribeDiffMismatch(const EntityDiff& got, const EntityDiff& want);

}  // namespace vsentinel::testing

#endif  // VSENTINEL_TESTS_SUPPORT_ORACLES_H_
