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

#include "support/serving.h"

#include <algorithm>

#include "vsentinel/eval.h"

namespace vsentinel::testing {

const Serving& Serving::Get() {
  static const Serving* serving = [] {
    auto* s = new Serving;
    SynthSpec spec;
    spec.n = 400;
    spec.seed = 5;
    spec.prevalence = 0.1;
    s->synth = GenerateSynthetic(spec);
    WriteSynthetic(s->fixture.path(), spec, s->synth);
    s->registry = PropertyRegistry::Parse(SynthPropertiesText());
    s->corpus = BuildCorpus(s->synth.envelopes, {}, PatternConfig::Defaults(), s->registry);
    ForestParams params;
    params.n_trees = 15;
    params.min_samples_leaf = 3;
    params.seed = 1;
    const Dataset data =
        CorpusDataset(s->corpus.records, GroupSet::All(), SplitAssignment::kUnassigned);
    TrainedModel model = Train(data, params, FeatureNames(), s->corpus.feature_schema);
    model.summary.groups = GroupSet::All().ToString();
    s->model = std::make_shared<const TrainedModel>(std::move(model));
    return s;
  }();
  return *serving;
}

std::unique_ptr<RevisionSource> Serving::Source() const {
  return OpenSource(SourceConfig::Parse("fixture:" + fixture.path().string()));
}

std::vector<int64_t> Serving::RevIds() const {
  std::vector<int64_t> ids;
  for (const auto& env : synth.envelopes) ids.push_back(env.meta.rev_id);
  return ids;
}

const RevisionEnvelope& Serving::Envelope(int64_t rev_id) const {
  auto it = std::lower_bound(
      synth.envelopes.begin(), synth.envelopes.end(), rev_id,
      [](const RevisionEnvelope& e, int64_t id) { return e.meta.rev_id < id; });
  return *it;
}

ServiceRig::ServiceRig(std::unique_ptr<RevisionSource> src,
                       std::shared_ptr<const TrainedModel> model,
                       ScoreCache::Options cache_options, ServiceOptions options)
    : source(std::move(src)),
      cache(std::move(cache_options)),
      service(std::move(model), source.get(), &cache, &latency, Serving::Get().registry,
              PatternConfig::Defaults(), options) {}

}  // namespace vsentinel::testing
