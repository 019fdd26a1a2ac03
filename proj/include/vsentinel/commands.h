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

// Pipeline stages behind the vandal-sentinel subcommands. Each Run* call
// writes its artifacts plus a run manifest next to them. The Args structs
// serialize to the same keys as the command-line flags, so a manifest's
// "config" object can be passed back with --config.

#ifndef VSENTINEL_COMMANDS_H_
#define VSENTINEL_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsentinel/error.h"
#include "vsentinel/service.h"

namespace vsentinel {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitUpstream = 4 };
int ExitCodeFor(ErrorCode code);

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  uint64_t seed = 0;
  nlohmann::json schema_versions = nlohmann::json::object();
  std::string started_at;
  double wall_seconds = 0.0;

  nlohmann::json ToJson() const;
};

// <artifact>.manifest.json for files, <artifact>/run_manifest.json for
// directories. Returns the path written.
std::filesystem::path ManifestPath(const std::filesystem::path& artifact);
std::filesystem::path WriteManifest(const std::filesystem::path& artifact,
                                    const RunManifest& manifest);

struct SynthCorpusArgs {
  std::filesystem::path out;  // fixture directory
  std::filesystem::path corpus;  // default <out>/corpus.jsonl
  int64_t n = 20000;
  double prevalence = 0.028;
  std::string signal = "user";
  uint64_t seed = 1;
  int64_t items = 0;
  double train_ratio = 0.8;

  nlohmann::json ToJson() const;
};

struct BuildCorpusArgs {
  std::string source;  // fixture:<dir> or live:<url>
  std::filesystem::path out;
  std::filesystem::path properties;  // default <fixture>/properties.txt
  int64_t revert_radius = 15;
  std::string revert_window = "30d";
  uint64_t seed = 0;
  std::string sample = "edits";
  int64_t sample_size = 0;
  double train_ratio = 0.8;
  std::filesystem::path labels;  // optional JSONL label events
  std::string from;  // live: ISO start of the recent-changes window
  int64_t limit = 0;  // live: stop after this many revisions (0 = until caught up)

  nlohmann::json ToJson() const;
};

struct TrainArgs {
  std::filesystem::path corpus;
  std::string groups = "all";
  std::filesystem::path params_grid;  // optional JSON grid
  int folds = 5;
  uint64_t seed = 0;
  std::filesystem::path out;

  nlohmann::json ToJson() const;
};

struct EvaluateArgs {
  std::vector<std::filesystem::path> models;  // empty: train the ablation
  std::filesystem::path corpus;
  std::optional<double> recall;
  std::filesystem::path params_grid;
  int folds = 5;
  uint64_t seed = 0;
  std::filesystem::path out;  // report directory

  nlohmann::json ToJson() const;
};

struct ReplayLatencyArgs {
  std::filesystem::path fixture;
  std::filesystem::path model;
  std::filesystem::path properties;
  std::string service;  // URL of a running service; empty starts one in process
  int64_t n = 1000;
  uint64_t seed = 0;
  double upstream_delay_ms = 0.0;
  std::filesystem::path out;  // CSV

  nlohmann::json ToJson() const;
};

struct ExportUiArgs {
  std::filesystem::path report;  // evaluate output directory
  std::filesystem::path out;
  std::string service_url;

  nlohmann::json ToJson() const;
};

struct ServeArgs {
  std::filesystem::path model;
  std::string source;
  std::filesystem::path cache_dir;
  std::filesystem::path properties;
  double threshold = 0.5;
  int64_t max_batch = 50;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path labels;  // default <cache-dir>/labels.jsonl
  std::filesystem::path curves;
  bool precache = false;
  std::string precache_from;

  nlohmann::json ToJson() const;
};

struct ReplayResult {
  std::vector<LatencyRecord> records;
  LatencyStats single;
  LatencyStats batch;
  LatencyStats cached;
  bool ordered = false;  // median cached < batch < single
};

void RunSynthCorpus(const SynthCorpusArgs& args, std::ostream& log);
void RunBuildCorpus(const BuildCorpusArgs& args, std::ostream& log);
void RunTrain(const TrainArgs& args, std::ostream& log);
void RunEvaluate(const EvaluateArgs& args, std::ostream& log);
ReplayResult RunReplayLatency(const ReplayLatencyArgs& args, std::ostream& log);
void RunExportUi(const ExportUiArgs& args, std::ostream& log);
// Blocks until the process is interrupted.
void RunServe(const ServeArgs& args, std::ostream& log);

PropertyRegistry LoadRegistryFor(const std::filesystem::path& properties,
                                 const std::string& source);

}  // namespace vsentinel

#endif  // VSENTINEL_COMMANDS_H_
