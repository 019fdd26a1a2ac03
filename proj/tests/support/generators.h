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

// Hand-rolled random generators for property tests.

#ifndef VSENTINEL_TESTS_SUPPORT_GENERATORS_H_
#define VSENTINEL_TESTS_SUPPORT_GENERATORS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vsentinel/corpus.h"
#include "vsentinel/entity.h"
#include "vsentinel/metrics.h"
#include "vsentinel/random.h"

namespace vsentinel::testing {

// Small vocabularies so that random pairs share keys and values often.
struct EntityShape {
  int max_per_section = 20;
  int languages = 6;
  int properties = 6;
  int items = 12;
};

SnakValue RandomValue(Rng& rng, const EntityShape& shape);
Statement RandomStatement(Rng& rng, const std::string& property, const EntityShape& shape);
EntityRevision RandomEntity(Rng& rng, const EntityShape& shape = {});
// A child that shares most of the parent: entries are kept, dropped, edited
// or added at random.
EntityRevision MutateEntity(Rng& rng, const EntityRevision& parent,
                            const EntityShape& shape = {});
// Registry marking P1 and P2 as external identifiers and P3 as a URL property.
PropertyRegistry ToyRegistry();

// Scores on a coarse grid so ties are common. Both classes present.
ScoredSet RandomScoredSet(Rng& rng, size_t max_n);

// Item history with states drawn from a small alphabet and increasing,
// bursty timestamps.
std::vector<HistoryEntry> RandomHistory(Rng& rng, size_t max_len, int64_t window_seconds);
Digest DigestOf(int state);

}  // namespace vsentinel::testing

#endif  // VSENTINEL_TESTS_SUPPORT_GENERATORS_H_
