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

#include "vsentinel/commands.h"

#include <csignal>
#include <chrono>
#include <memory>
#include <ostream>

#include "vsentinel/corpus.h"
#include "vsentinel/eval.h"
#include "vsentinel/file_util.h"
#include "vsentinel/fixture_api.h"
#include "vsentinel/forest.h"
#include "vsentinel/http_api.h"
#include "vsentinel/labels.h"
#include "vsentinel/random.h"
#include "vsentinel/synth.h"

namespace vsentinel {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

json PathOrNull(const std::filesystem::path& p) {
  return p.empty() ? json(nullptr) : json(p.string());
}

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

RunManifest StartManifest(const char* subcommand, json config, uint64_t seed) {
  RunManifest m;
  m.subcommand = subcommand;
  m.config = std::move(config);
  m.seed = seed;
  m.started_at = FormatIsoTimestamp(NowSeconds());
  m.schema_versions = {{"features", kFeatureSchemaVersion},
                       {"corpus", kCorpusSchemaVersion},
                       {"model_format", kModelFormatVersion},
                       {"report", kReportSchemaVersion},
                       {"synth", kSynthVersion}};
  return m;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfig, what);
}

void RequireInput(const std::filesystem::path& path, const std::string& flag) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, flag + " not found: " + path.string());
  }
}

std::vector<ForestParams> LoadGrid(const std::filesystem::path& path) {
  if (path.empty()) return {ForestParams{}};
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "params grid not found: " + path.string());
  }
  return ParseParamsGrid(ReadFile(path));
}

std::optional<std::filesystem::path> FixtureDirOf(const std::string& source) {
  if (source.rfind("fixture:", 0) == 0) return std::filesystem::path(source.substr(8));
  return std::nullopt;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidSpec:
      return kExitConfig;
    case ErrorCode::kTransport:
    case ErrorCode::kUpstreamUnavailable:
    case ErrorCode::kServiceUnreachable:
      return kExitUpstream;
    default:
      return kExitData;
  }
}

json RunManifest::ToJson() const {
  return {{"subcommand", subcommand},       {"config", config},
          {"inputs", inputs},               {"outputs", outputs},
          {"seed", seed},                   {"schema_versions", schema_versions},
          {"started_at", started_at},       {"wall_seconds", wall_seconds}};
}

std::filesystem::path ManifestPath(const std::filesystem::path& artifact) {
  if (std::filesystem::is_directory(artifact)) return artifact / "run_manifest.json";
  return std::filesystem::path(artifact.string() + ".manifest.json");
}

std::filesystem::path WriteManifest(const std::filesystem::path& artifact,
                                    const RunManifest& manifest) {
  const std::filesystem::path path = ManifestPath(artifact);
  WriteFile(path, manifest.ToJson().dump(1) + "\n");
  return path;
}

json SynthCorpusArgs::ToJson() const {
  return {{"out", PathOrNull(out)},     {"corpus", PathOrNull(corpus)},
          {"n", n},                     {"prevalence", prevalence},
          {"signal", signal},           {"seed", seed},
          {"items", items},             {"train-ratio", train_ratio}};
}

json BuildCorpusArgs::ToJson() const {
  return {{"source", source},
          {"out", PathOrNull(out)},
          {"properties", PathOrNull(properties)},
          {"revert-radius", revert_radius},
          {"revert-window", revert_window},
          {"seed", seed},
          {"sample", sample},
          {"sample-size", sample_size},
          {"train-ratio", train_ratio},
          {"labels", PathOrNull(labels)},
          {"from", from},
          {"limit", limit}};
}

json TrainArgs::ToJson() const {
  return {{"corpus", PathOrNull(corpus)}, {"groups", groups},
          {"params-grid", PathOrNull(params_grid)}, {"folds", folds},
          {"seed", seed},                   {"out", PathOrNull(out)}};
}

json EvaluateArgs::ToJson() const {
  json model_list = json::array();
  for (const auto& m : models) model_list.push_back(m.string());
  return {{"model", model_list},
          {"corpus", PathOrNull(corpus)},
          {"recall", recall ? json(*recall) : json(nullptr)},
          {"params-grid", PathOrNull(params_grid)},
          {"folds", folds},
          {"seed", seed},
          {"out", PathOrNull(out)}};
}

json ReplayLatencyArgs::ToJson() const {
  return {{"fixture", PathOrNull(fixture)},
          {"model", PathOrNull(model)},
          {"properties", PathOrNull(properties)},
          {"service", service},
          {"n", n},
          {"seed", seed},
          {"upstream-delay-ms", upstream_delay_ms},
          {"out", PathOrNull(out)}};
}

json ExportUiArgs::ToJson() const {
  return {{"report", PathOrNull(report)}, {"out", PathOrNull(out)},
          {"service-url", service_url}};
}

json ServeArgs::ToJson() const {
  return {{"model", PathOrNull(model)},
          {"source", source},
          {"cache-dir", PathOrNull(cache_dir)},
          {"properties", PathOrNull(properties)},
          {"threshold", threshold},
          {"max-batch", max_batch},
          {"host", host},
          {"port", port},
          {"labels", PathOrNull(labels)},
          {"curves", PathOrNull(curves)},
          {"precache", precache},
          {"precache-from", precache_from}};
}

PropertyRegistry LoadRegistryFor(const std::filesystem::path& properties,
                                 const std::string& source) {
  std::filesystem::path path = properties;
  if (path.empty()) {
    if (auto dir = FixtureDirOf(source)) path = *dir / "properties.txt";
  }
  Require(!path.empty(), "--properties is required for live sources");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "properties file not found: " + path.string());
  }
  PropertyRegistry registry = PropertyRegistry::Load(path);
  if (!registry.schema_version().empty() && registry.schema_version() != kFeatureSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch, "property registry written for " +
                                                registry.schema_version());
  }
  return registry;
}

void RunSynthCorpus(const SynthCorpusArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.out.empty(), "--out is required");
  SynthSpec spec;
  spec.n = args.n;
  spec.prevalence = args.prevalence;
  spec.signal = ParseSignalPlacement(args.signal);
  spec.seed = args.seed;
  spec.items = args.items;
  spec.Validate();
  const SynthOutput output = GenerateSynthetic(spec);
  WriteSynthetic(args.out, spec, output);

  const PropertyRegistry registry = PropertyRegistry::Parse(SynthPropertiesText());
  CorpusOptions options;
  options.seed = args.seed;
  Corpus corpus = BuildCorpus(output.envelopes, options, PatternConfig::Defaults(), registry);
  SplitTrainTest(corpus.records, args.train_ratio, args.seed);
  const std::filesystem::path corpus_path =
      args.corpus.empty() ? args.out / "corpus.jsonl" : args.corpus;
  WriteCorpus(corpus_path, corpus);
  log << corpus.summary.ToTable();

  RunManifest m = StartManifest("synth-corpus", args.ToJson(), args.seed);
  m.config["synth_spec"] = spec.ToJson();
  m.outputs = {args.out.string(), corpus_path.string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
  WriteManifest(corpus_path, m);
}

void RunBuildCorpus(const BuildCorpusArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.source.empty(), "--source is required");
  Require(!args.out.empty(), "--out is required");
  CorpusOptions options;
  options.revert.radius = args.revert_radius;
  options.revert.window_seconds = ParseDuration(args.revert_window);
  options.revert.Validate();
  options.sample = ParseSampleMode(args.sample);
  options.sample_size = args.sample_size;
  options.seed = args.seed;
  const SourceConfig source = SourceConfig::Parse(args.source);
  source.Validate();
  const PropertyRegistry registry = LoadRegistryFor(args.properties, args.source);

  std::vector<RevisionEnvelope> envelopes;
  int64_t dropped = 0;
  if (source.mode == SourceConfig::Mode::kFixture) {
    envelopes = LoadFixtureEnvelopes(source.fixture_dir);
  } else {
    auto live = OpenSource(source);
    const UnixSeconds from = args.from.empty() ? 0 : ParseIsoTimestamp(args.from);
    auto stream = live->StreamRecent(from, std::nullopt);
    while (args.limit == 0 || static_cast<int64_t>(envelopes.size()) < args.limit) {
      std::optional<RevisionEnvelope> env = stream->Next();
      if (!env) break;
      envelopes.push_back(std::move(*env));
    }
    dropped = stream->dropped();
  }
  Corpus corpus = BuildCorpus(envelopes, options, PatternConfig::Defaults(), registry);
  corpus.summary.dropped += dropped;
  SplitTrainTest(corpus.records, args.train_ratio, args.seed);
  if (!args.labels.empty()) {
    RequireInput(args.labels, "--labels");
    const std::vector<LabelEvent> events = ParseLabelEvents(ReadFile(args.labels));
    const OverrideStats stats = ApplyOverrides(corpus, events);
    log << "label overrides applied: " << stats.applied << ", unknown revisions: "
        << stats.unknown << "\n";
  }
  WriteCorpus(args.out, corpus);
  log << corpus.summary.ToTable();

  RunManifest m = StartManifest("build-corpus", args.ToJson(), args.seed);
  m.inputs = {args.source};
  if (!args.labels.empty()) m.inputs.push_back(args.labels.string());
  m.outputs = {args.out.string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
}

void RunTrain(const TrainArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.corpus.empty(), "--corpus is required");
  Require(!args.out.empty(), "--out is required");
  const GroupSet groups = GroupSet::Parse(args.groups);
  const std::vector<ForestParams> grid = LoadGrid(args.params_grid);
  RequireInput(args.corpus, "--corpus");
  const Corpus corpus = ReadCorpus(args.corpus);
  bool split = false;
  for (const CorpusRecord& r : corpus.records) split |= r.split != SplitAssignment::kUnassigned;
  const Dataset train = CorpusDataset(
      corpus.records, groups, split ? SplitAssignment::kTrain : SplitAssignment::kUnassigned);
  const GridSearchResult search = GridSearch(train, grid, args.folds, args.seed);
  TrainedModel model = Train(train, search.best, FeatureNames(groups), corpus.feature_schema);
  model.summary.groups = groups.ToString();
  model.Save(args.out);
  log << "trained " << model.trees.size() << " trees on " << train.n_rows() << " rows ("
      << groups.ToString() << "), model version " << model.Version() << "\n";

  RunManifest m = StartManifest("train", args.ToJson(), args.seed);
  json cells = json::array();
  for (size_t c = 0; c < grid.size(); ++c) {
    cells.push_back({{"params", grid[c].ToJson()}, {"mean_pr_auc", search.mean_pr_auc[c]}});
  }
  m.config["grid_search"] = {{"best_cell", search.best_cell}, {"cells", cells}};
  m.inputs = {args.corpus.string()};
  if (!args.params_grid.empty()) m.inputs.push_back(args.params_grid.string());
  m.outputs = {args.out.string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
}

void RunEvaluate(const EvaluateArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.corpus.empty(), "--corpus is required");
  Require(!args.out.empty(), "--out is required");
  if (args.recall) {
    Require(*args.recall > 0.0 && *args.recall <= 1.0, "--recall must be in (0, 1]");
  }
  RequireInput(args.corpus, "--corpus");
  const Corpus corpus = ReadCorpus(args.corpus);
  EvalReport report;
  if (args.models.empty()) {
    AblationOptions options;
    options.grid = LoadGrid(args.params_grid);
    options.folds = args.folds;
    options.seed = args.seed;
    options.target_recall = args.recall;
    report = RunAblation(corpus, options);
  } else {
    std::vector<TrainedModel> models;
    for (const auto& path : args.models) {
      RequireInput(path, "--model");
      models.push_back(TrainedModel::Load(path));
      CheckModelMatchesCorpus(models.back(), corpus);
    }
    report.config = {{"seed", args.seed},
                     {"target_recall", args.recall ? json(*args.recall)
                                                   : json("max recall with filter > 0")},
                     {"pr_auc", "average precision, tied scores as one block"},
                     {"feature_schema", corpus.feature_schema},
                     {"corpus_summary", corpus.summary.ToJson()}};
    for (const TrainedModel& model : models) {
      try {
        report.rows.push_back(ScoreModel(model, corpus.records, args.recall));
      } catch (const Error& e) {
        ComboResult row;
        row.groups = model.summary.groups;
        row.error = e.what();
        report.rows.push_back(std::move(row));
      }
    }
  }
  report.Write(args.out);
  log << report.ToTable();

  RunManifest m = StartManifest("evaluate", args.ToJson(), args.seed);
  m.inputs = {args.corpus.string()};
  for (const auto& p : args.models) m.inputs.push_back(p.string());
  m.outputs = {(args.out / "report.json").string(), (args.out / "table.txt").string(),
               (args.out / "curves").string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
}

ReplayResult RunReplayLatency(const ReplayLatencyArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.out.empty(), "--out is required");
  Require(args.n >= 0, "--n must be non-negative");
  ReplayResult result;
  if (args.n == 0) {
    WriteFile(args.out, LatencyCsv({}));
  } else {
    Require(!args.fixture.empty(), "--fixture is required");
    RequireInput(args.fixture, "--fixture");
    std::vector<RevisionEnvelope> envelopes = LoadFixtureEnvelopes(args.fixture);
    std::vector<int64_t> ids;
    for (const RevisionEnvelope& e : envelopes) ids.push_back(e.meta.rev_id);
    if (static_cast<int64_t>(ids.size()) < args.n) {
      throw Error(ErrorCode::kInvalidArgument, "fixture holds only " +
                                                   std::to_string(ids.size()) + " revisions");
    }
    Rng rng(DeriveSeed(args.seed, 11));
    rng.Shuffle(std::span(ids));
    ids.resize(static_cast<size_t>(args.n));

    if (!args.service.empty()) {
      ServiceClient client(args.service);
      result.records = ReplayLatency(client, ids, ids.size());
    } else {
      Require(!args.model.empty(), "--model is required without --service");
      RequireInput(args.model, "--model");
      auto model = std::make_shared<TrainedModel>(TrainedModel::Load(args.model));
      const PropertyRegistry registry =
          LoadRegistryFor(args.properties, "fixture:" + args.fixture.string());
      FixtureWikiApi::Options api_options;
      api_options.delay = std::chrono::microseconds(
          static_cast<int64_t>(args.upstream_delay_ms * 1000.0));
      FixtureWikiApi api(envelopes, api_options);
      api.Start();
      SourceConfig source = SourceConfig::Parse("live:" + api.url());
      source.rate_limit = 1e9;
      auto upstream = OpenSource(source);
      ScoreCache cache;
      LatencyRecorder recorder;
      ScoringService service(model, upstream.get(), &cache, &recorder, registry,
                             PatternConfig::Defaults(), ServiceOptions{});
      ApiServer server(&service, nullptr, nullptr, {});
      server.Start();
      auto client = std::make_unique<ServiceClient>("http://127.0.0.1:" +
                                                    std::to_string(server.port()));
      result.records = ReplayLatency(*client, ids, ids.size());
      // Open keep-alive connections would hold up both servers' shutdown.
      client.reset();
      server.Stop();
      upstream.reset();
      api.Stop();
    }
    WriteFile(args.out, LatencyCsv(result.records));
  }
  std::vector<double> single, batch, cached;
  for (const LatencyRecord& r : result.records) {
    (r.mode == LatencyMode::kSingle ? single
     : r.mode == LatencyMode::kBatch ? batch
                                     : cached)
        .push_back(r.seconds);
  }
  result.single = Summarize(single);
  result.batch = Summarize(batch);
  result.cached = Summarize(cached);
  result.ordered = result.single.count > 0 && result.cached.median < result.batch.median &&
                   result.batch.median < result.single.median;
  log << "single n=" << result.single.count << " median " << result.single.median << " s\n"
      << "batch  n=" << result.batch.count << " median " << result.batch.median
      << " s per revision\n"
      << "cached n=" << result.cached.count << " median " << result.cached.median << " s\n";
  if (!result.records.empty()) {
    log << "ordering cached < batch < single: " << (result.ordered ? "holds" : "violated")
        << "\n";
  }

  RunManifest m = StartManifest("replay-latency", args.ToJson(), args.seed);
  m.inputs = {args.fixture.string(), args.model.string()};
  m.outputs = {args.out.string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
  return result;
}

void RunExportUi(const ExportUiArgs& args, std::ostream& log) {
  const auto start = Clock::now();
  Require(!args.report.empty(), "--report is required");
  Require(!args.out.empty(), "--out is required");
  const EvalReport report = EvalReport::Read(args.report);
  std::filesystem::create_directories(args.out);
  const std::vector<std::filesystem::path> curves = report.WriteCurves(args.out / "curves");
  WriteFile(args.out / "table.txt", report.ToTable());
  json files = json::array();
  for (const auto& p : curves) files.push_back(p.filename().string());
  json combos = json::array();
  for (const ComboResult& r : report.rows) {
    if (r.error) continue;
    combos.push_back({{"groups", r.groups},
                      {"stem", CurveFileStem(r.groups)},
                      {"roc_auc", r.roc_auc},
                      {"pr_auc", r.pr_auc},
                      {"filter_rate", r.op.filter_rate},
                      {"at_recall", r.op.achieved_recall},
                      {"threshold", r.op.threshold}});
  }
  WriteFile(args.out / "ui_config.json",
            json({{"service_url", args.service_url}, {"combos", combos}, {"curves", files}})
                    .dump(1) +
                "\n");
  log << report.ToTable() << curves.size() << " curve files written to "
      << (args.out / "curves").string() << "\n";

  RunManifest m = StartManifest("export-ui-data", args.ToJson(), 0);
  m.inputs = {args.report.string()};
  m.outputs = {args.out.string()};
  m.wall_seconds = Since(start);
  WriteManifest(args.out, m);
}

void RunServe(const ServeArgs& args, std::ostream& log) {
  Require(!args.source.empty(), "--source is required");
  Require(args.max_batch >= 1, "--max-batch must be positive");
  Require(args.threshold >= 0.0 && args.threshold <= 1.0, "--threshold must be in [0, 1]");
  std::shared_ptr<const TrainedModel> model;
  if (!args.model.empty()) RequireInput(args.model, "--model");
  if (!args.model.empty()) model = std::make_shared<TrainedModel>(TrainedModel::Load(args.model));
  const PropertyRegistry registry = LoadRegistryFor(args.properties, args.source);
  const SourceConfig source_config = SourceConfig::Parse(args.source);
  source_config.Validate();
  auto source = OpenSource(source_config);
  ScoreCache::Options cache_options;
  cache_options.dir = args.cache_dir;
  ScoreCache cache(cache_options);
  LatencyRecorder recorder;
  ServiceOptions options;
  options.threshold = args.threshold;
  options.max_batch = static_cast<size_t>(args.max_batch);
  ScoringService service(model, source.get(), &cache, &recorder, registry,
                         PatternConfig::Defaults(), options);
  std::filesystem::path label_path = args.labels;
  if (label_path.empty() && !args.cache_dir.empty()) label_path = args.cache_dir / "labels.jsonl";
  LabelStore labels(label_path);

  std::unique_ptr<PrecacheWorker> worker;
  if (args.precache && model) {
    PrecacheWorker::Options wo;
    if (!args.precache_from.empty()) wo.from_ts = ParseIsoTimestamp(args.precache_from);
    worker = std::make_unique<PrecacheWorker>(&service, wo);
  }
  ApiServer::Options api_options;
  api_options.curves_dir = args.curves;
  ApiServer server(&service, &labels, worker.get(), api_options);
  const int port = server.Bind(args.host, args.port);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  if (worker) worker->Start();
  log << "serving model " << (model ? service.model_version() : "<none>") << " on http://"
      << args.host << ":" << port << "\n";
  log.flush();
  server.Listen();
  if (worker) worker->Stop();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
}

}  // namespace vsentinel
