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

// A small synthetic fixture and model shared by the service and HTTP tests.

#ifndef VSENTINEL_TESTS_SUPPORT_SERVING_H_
#define VSENTINEL_TESTS_SUPPORT_SERVING_H_

#include <memory>
#include <vector>

#include "support/temp_dir.h"
#include "vsentinel/corpus.h"
#include "vsentinel/forest.h"
#include "vsentinel/ingestion.h"
#include "vsentinel/service.h"
#include "vsentinel/synth.h"

namespace vsentinel::testing {

struct Serving {
  SynthOutput synth;
  TempDir fixture;
  PropertyRegistry registry;
  Corpus corpus;
  std::shared_ptr<const TrainedModel> model;

  // Built once per process.
  static const Serving& Get();

  std::unique_ptr<RevisionSource> Source() const;
  std::vector<int64_t> RevIds() const;
  const RevisionEnvelope& Envelope(int64_t rev_id) const;
};

// Owns the pieces a ScoringService points at.
struct ServiceRig {
  explicit ServiceRig(std::unique_ptr<RevisionSource> source,
                      std::shared_ptr<const TrainedModel> model = Serving::Get().model,
                      ScoreCache::Options cache_options = {}, ServiceOptions options = {});

  std::unique_ptr<RevisionSource> source;
  ScoreCache cache;
  LatencyRecorder latency;
  ScoringService service;
};

}  // namespace vsentinel::testing

#endif  // VSENTINEL_TESTS_SUPPORT_SERVING_H_
