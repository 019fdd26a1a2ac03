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

// Revision fixtures where the test picks every user, comment and content
// state, so the expected corpus fields come from the plan rather than the
// pipeline.

#ifndef VSENTINEL_TESTS_SUPPORT_PLANNED_FIXTURE_H_
#define VSENTINEL_TESTS_SUPPORT_PLANNED_FIXTURE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vsentinel/corpus.h"
#include "vsentinel/ingestion.h"

namespace vsentinel::testing {

// Admin (sysop), Newcomer, an IP editor, Helper (rollbacker), Crawler (bot).
const std::vector<UserInfo>& Users();

struct PlannedComment {
  std::string text;
  EditKind kind;
};

// regular, client, merge, revertish, creation.
const std::vector<PlannedComment>& Comments();

std::string StateJson(const std::string& item, int state);

struct Expected {
  UserTrust trust;
  EditKind kind;
  bool reverted;
  bool bot;
};

struct PlannedFixture {
  std::vector<RevisionEnvelope> envelopes;  // rev_id order, items interleaved
  std::map<int64_t, Expected> expected;
};

// items x per_item revisions, timestamps within the default revert window.
PlannedFixture Plan(uint64_t seed, int items, int per_item);

// Table-1 rows, positives and bot count derived from the plan alone.
CorpusSummary ExpectedSummary(const PlannedFixture& fixture);

}  // namespace vsentinel::testing

#endif  // VSENTINEL_TESTS_SUPPORT_PLANNED_FIXTURE_H_
