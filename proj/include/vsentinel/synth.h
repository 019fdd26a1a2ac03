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

#ifndef VSENTINEL_SYNTH_H_
#define VSENTINEL_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vsentinel/diff.h"
#include "vsentinel/entity.h"
#include "vsentinel/ingestion.h"

namespace vsentinel {

inline constexpr std::string_view kSynthVersion = "synth/1";

// Where the vandal/good contrast is planted.
enum class SignalPlacement {
  kUser,     // mostly in who edits (anonymous and new accounts), some in content
  kContent,  // vandals edit like everyone else but leave content patterns
  kNone,     // vandal edits are indistinguishable from good ones
};

const char* SignalPlacementName(SignalPlacement s);
SignalPlacement ParseSignalPlacement(std::string_view name);

struct SynthSpec {
  int64_t n = 20000;  // human edits, i.e. corpus records
  double prevalence = 0.028;
  SignalPlacement signal = SignalPlacement::kUser;
  uint64_t seed = 1;
  int64_t items = 0;  // 0 picks n / 25
  double trusted_share = 0.30;
  double client_share = 0.03;
  double merge_share = 0.01;
  double creation_share = 0.01;
  double bot_share = 0.05;  // extra bot edits, outside the n human edits
  // Good-faith non-trusted edits that still get reverted.
  double goodfaith_revert_rate = 0.0;

  // Throws Error(kInvalidSpec).
  void Validate() const;
  nlohmann::json ToJson() const;
  static SynthSpec FromJson(const nlohmann::json& doc);
};

struct SynthOutput {
  std::vector<RevisionEnvelope> envelopes;  // rev_id order
  std::map<std::string, UserInfo> users;    // registered users
  std::map<int64_t, bool> ground_truth;     // human edits: true for planted vandalism
};

SynthOutput GenerateSynthetic(const SynthSpec& spec);

// Datatypes of every property the generator uses.
std::string SynthPropertiesText();

// Fixture files plus properties.txt, truth.jsonl and synth_spec.json.
void WriteSynthetic(const std::filesystem::path& dir, const SynthSpec& spec,
                    const SynthOutput& output);

}  // namespace vsentinel

#endif  // VSENTINEL_SYNTH_H_
