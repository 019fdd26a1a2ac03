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

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsentinel/commands.h"
#include "vsentinel/file_util.h"

namespace vsentinel {
namespace {

using nlohmann::json;

std::string ScalarText(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Accepts either a run manifest ({"subcommand", "config": {...}}) or
// {"<subcommand>": {...}, "<shared key>": ...}. Keys may use '-' or '_'.
json ConfigFor(const json& doc, const std::string& subcommand) {
  json merged = json::object();
  auto take = [&merged](const json& obj) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it.value().is_object()) continue;
      std::string key = it.key();
      std::replace(key.begin(), key.end(), '_', '-');
      merged[key] = it.value();
    }
  };
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "--config must hold a JSON object");
  if (doc.contains("subcommand") && doc.contains("config") && doc["config"].is_object()) {
    if (doc["subcommand"] != subcommand) {
      throw Error(ErrorCode::kConfig, "config was written for " +
                                          doc["subcommand"].get<std::string>());
    }
    take(doc["config"]);
    return merged;
  }
  take(doc);
  if (auto it = doc.find(subcommand); it != doc.end() && it->is_object()) take(*it);
  return merged;
}

void ApplyFallbacks(CLI::App* sub, const json& config, const EnvLookup& env) {
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::vector<std::string> values;
    if (auto v = env(EnvNameFor(name)); v && !v->empty()) {
      values.push_back(*v);
    } else if (auto it = config.find(name); it != config.end() && !it->is_null()) {
      if (it->is_array()) {
        for (const json& e : *it) values.push_back(ScalarText(e));
      } else {
        values.push_back(ScalarText(*it));
      }
    }
    if (values.empty()) continue;
    for (std::string& v : values) opt->add_result(std::move(v));
    opt->run_callback();
  }
}

}  // namespace

std::optional<std::string> ProcessEnv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

std::string EnvNameFor(const std::string& flag) {
  std::string out = "VS_";
  for (char c : flag) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const EnvLookup& env) {
  CLI::App app{"Wikidata vandalism detection: corpus, models, evaluation and scoring service",
               "vandal-sentinel"};
  app.require_subcommand(1);
  // Lets --config follow the subcommand.
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags and VS_* env vars win");

  SynthCorpusArgs synth;
  auto* s = app.add_subcommand("synth-corpus", "Generate a synthetic revision fixture");
  s->add_option("--out", synth.out, "Fixture directory");
  s->add_option("--corpus", synth.corpus, "Corpus path (default <out>/corpus.jsonl)");
  s->add_option("--n", synth.n, "Revisions");
  s->add_option("--prevalence", synth.prevalence, "Vandalism rate");
  s->add_option("--signal", synth.signal, "user|content|none");
  s->add_option("--seed", synth.seed);
  s->add_option("--items", synth.items, "Items (0 picks from n)");
  s->add_option("--train-ratio", synth.train_ratio);

  BuildCorpusArgs build;
  auto* b = app.add_subcommand("build-corpus", "Label revisions by revert detection");
  b->add_option("--source", build.source, "fixture:<dir> or live:<api url>");
  b->add_option("--out", build.out, "Corpus JSONL");
  b->add_option("--properties", build.properties, "Property registry file");
  b->add_option("--revert-radius", build.revert_radius);
  b->add_option("--revert-window", build.revert_window, "e.g. 30d, 12h");
  b->add_option("--seed", build.seed);
  b->add_option("--sample", build.sample, "edits|items");
  b->add_option("--sample-size", build.sample_size, "0 keeps everything");
  b->add_option("--train-ratio", build.train_ratio);
  b->add_option("--labels", build.labels, "Reviewer label events (JSONL)");
  b->add_option("--from", build.from, "Live: ISO start time");
  b->add_option("--limit", build.limit, "Live: max revisions");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a random forest");
  t->add_option("--corpus", train.corpus);
  t->add_option("--groups", train.groups, "all or a comma list of general,context,type,user");
  t->add_option("--params-grid", train.params_grid, "JSON grid of forest parameters");
  t->add_option("--folds", train.folds);
  t->add_option("--seed", train.seed);
  t->add_option("--out", train.out, "Model file");

  EvaluateArgs evaluate;
  double recall = 0.0;
  auto* e = app.add_subcommand("evaluate", "Score models or run the feature-group ablation");
  e->add_option("--model", evaluate.models, "Model file, repeatable; none runs the ablation");
  auto* recall_opt = e->add_option("--recall", recall, "Target recall for the filter rate");
  e->add_option("--corpus", evaluate.corpus);
  e->add_option("--params-grid", evaluate.params_grid);
  e->add_option("--folds", evaluate.folds);
  e->add_option("--seed", evaluate.seed);
  e->add_option("--out", evaluate.out, "Report directory");

  ReplayLatencyArgs replay;
  auto* r = app.add_subcommand("replay-latency", "Measure single, batch and cached latency");
  r->add_option("--fixture", replay.fixture);
  r->add_option("--model", replay.model);
  r->add_option("--properties", replay.properties);
  r->add_option("--service", replay.service, "Running service URL");
  r->add_option("--n", replay.n);
  r->add_option("--seed", replay.seed);
  r->add_option("--upstream-delay-ms", replay.upstream_delay_ms);
  r->add_option("--out", replay.out, "Latency CSV");

  ExportUiArgs ui;
  auto* x = app.add_subcommand("export-ui-data", "Write curves and table for the patrol UI");
  x->add_option("--report", ui.report, "evaluate output directory");
  x->add_option("--out", ui.out);
  x->add_option("--service-url", ui.service_url);

  ServeArgs serve;
  auto* v = app.add_subcommand("serve", "Run the scoring service");
  v->add_option("--model", serve.model);
  v->add_option("--source", serve.source, "fixture:<dir> or live:<api url>");
  v->add_option("--cache-dir", serve.cache_dir, "Persistent score cache");
  v->add_option("--properties", serve.properties);
  v->add_option("--threshold", serve.threshold);
  v->add_option("--max-batch", serve.max_batch);
  v->add_option("--host", serve.host);
  v->add_option("--port", serve.port);
  v->add_option("--labels", serve.labels, "Label event log (JSONL)");
  v->add_option("--curves", serve.curves, "Curve directory from export-ui-data");
  v->add_flag("--precache", serve.precache, "Score recent changes in the background");
  v->add_option("--precache-from", serve.precache_from, "ISO start for precaching");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    json config = json::object();
    if (!config_path.empty()) {
      if (!std::filesystem::exists(config_path)) {
        throw Error(ErrorCode::kConfig, "config file not found: " + config_path);
      }
      json doc;
      try {
        doc = json::parse(ReadFile(config_path));
      } catch (const json::exception& je) {
        throw Error(ErrorCode::kConfig, std::string("config is not JSON: ") + je.what());
      }
      config = ConfigFor(doc, sub->get_name());
    }
    try {
      ApplyFallbacks(sub, config, env);
    } catch (const CLI::ParseError& pe) {
      throw Error(ErrorCode::kConfig, pe.what());
    }
    if (recall_opt->count() > 0) evaluate.recall = recall;

    const std::string name = sub->get_name();
    if (name == "synth-corpus") RunSynthCorpus(synth, out);
    if (name == "build-corpus") RunBuildCorpus(build, out);
    if (name == "train") RunTrain(train, out);
    if (name == "evaluate") RunEvaluate(evaluate, out);
    if (name == "replay-latency") RunReplayLatency(replay, out);
    if (name == "export-ui-data") RunExportUi(ui, out);
    if (name == "serve") RunServe(serve, out);
  } catch (const Error& error) {
    err << error.what() << "\n";
    return ExitCodeFor(error.code());
  } catch (const std::exception& ex) {
    err << "InternalError: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace vsentinel
