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

#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "support/temp_dir.h"
#include "vsentinel/commands.h"
#include "vsentinel/corpus.h"
#include "vsentinel/file_util.h"
#include "vsentinel/forest.h"

namespace vsentinel {
namespace {

using nlohmann::json;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err, [&](const std::string& name) {
    auto it = env.find(name);
    return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
  });
  return {code, out.str(), err.str()};
}

json Manifest(const std::filesystem::path& artifact) {
  return json::parse(ReadFile(ManifestPath(artifact)));
}

TEST(CliTest, EnvNames) {
  EXPECT_EQ(EnvNameFor("revert-window"), "VS_REVERT_WINDOW");
  EXPECT_EQ(EnvNameFor("n"), "VS_N");
}

TEST(CliTest, FlagBeatsEnvBeatsConfigBeatsDefault) {
  TempDir dir;
  WriteFile(dir / "cfg.json", R"({"n": 300, "prevalence": 0.05, "seed": 4})");
  auto config_of = [&](const CliRun& r, const std::string& name) {
    EXPECT_EQ(r.code, 0) << r.err;
    return Manifest(dir / name).at("config");
  };
  const json from_config =
      config_of(Cli({"synth-corpus", "--out", (dir / "a").string(), "--config", (dir / "cfg.json").string()}), "a");
  EXPECT_EQ(from_config.at("n"), 300);
  EXPECT_EQ(from_config.at("seed"), 4);
  EXPECT_EQ(from_config.at("train-ratio"), 0.8);  // default

  const json from_env = config_of(Cli({"synth-corpus", "--out", (dir / "b").string(), "--config",
                                  (dir / "cfg.json").string()},
                                 {{"VS_N", "200"}}),
                             "b");
  EXPECT_EQ(from_env.at("n"), 200);
  EXPECT_EQ(from_env.at("prevalence"), 0.05);

  const json from_flag = config_of(Cli({"synth-corpus", "--out", (dir / "c").string(), "--n", "100",
                                   "--config", (dir / "cfg.json").string()},
                                  {{"VS_N", "200"}, {"VS_SEED", "9"}}),
                              "c");
  EXPECT_EQ(from_flag.at("n"), 100);
  EXPECT_EQ(from_flag.at("seed"), 9);
  EXPECT_EQ(ReadCorpus(dir / "c" / "corpus.jsonl").records.size(), 100u);
}

TEST(CliTest, SectionedConfig) {
  TempDir dir;
  WriteFile(dir / "cfg.json", R"({"seed": 3, "synth-corpus": {"n": 120}, "train": {"n": 5}})");
  const CliRun r = Cli({"synth-corpus", "--out", (dir / "a").string(), "--config",
                     (dir / "cfg.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Manifest(dir / "a").at("config").at("n"), 120);
  EXPECT_EQ(Manifest(dir / "a").at("config").at("seed"), 3);
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"train"}).code, 2);  // --corpus and --out are required
  EXPECT_EQ(Cli({"train", "--corpus", (dir / "none.jsonl").string(), "--out",
                 (dir / "m.json").string()})
                .code,
            2);
  EXPECT_EQ(Cli({"synth-corpus", "--out", (dir / "s").string(), "--prevalence", "0"}).code, 2);
  EXPECT_EQ(Cli({"synth-corpus", "--out", (dir / "s").string(), "--n", "abc"}).code, 2);
  EXPECT_EQ(Cli({"train", "--corpus", (dir / "none.jsonl").string(), "--out",
                 (dir / "m.json").string()},
                {{"VS_FOLDS", "many"}})
                .code,
            2);

  WriteFile(dir / "bad.jsonl", "{\"not\": \"a corpus\"}\n");
  const CliRun bad = Cli({"train", "--corpus", (dir / "bad.jsonl").string(), "--out",
                       (dir / "m.json").string()});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("SchemaMismatch"), std::string::npos) << bad.err;

  std::filesystem::create_directories(dir / "empty_report");
  EXPECT_EQ(Cli({"export-ui-data", "--report", (dir / "empty_report").string(), "--out",
                 (dir / "ui").string()})
                .code,
            3);

  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfig), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kInvalidSpec), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kServiceUnreachable), 4);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kTransport), 4);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kSchemaMismatch), 3);
}

// synth-corpus -> train -> evaluate -> export-ui-data, then every stage again
// from its own manifest.
TEST(CliTest, PipelineReproducesFromManifests) {
  TempDir dir;
  const std::string fx = (dir / "fx").string();
  const std::string corpus = (dir / "fx" / "corpus.jsonl").string();
  const std::string model = (dir / "model.json").string();
  const std::string report = (dir / "report").string();
  const std::string ui = (dir / "ui").string();
  ASSERT_EQ(Cli({"synth-corpus", "--out", fx, "--n", "800", "--seed", "2"}).code, 0);
  const CliRun train = Cli({"train", "--corpus", corpus, "--out", model, "--seed", "3"});
  ASSERT_EQ(train.code, 0) << train.err;
  const CliRun eval = Cli({"evaluate", "--model", model, "--corpus", corpus, "--out", report,
                        "--recall", "0.8"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_NE(eval.out.find("paper"), std::string::npos);
  const CliRun exp = Cli({"export-ui-data", "--report", report, "--out", ui});
  ASSERT_EQ(exp.code, 0) << exp.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "ui" / "ui_config.json"));

  const json tm = Manifest(model);
  EXPECT_EQ(tm.at("subcommand"), "train");
  EXPECT_EQ(tm.at("seed"), 3);
  EXPECT_FALSE(tm.at("inputs").empty());

  // Re-run each stage from its manifest into a second tree.
  TempDir again;
  auto rerun = [&](const std::filesystem::path& artifact, const std::string& sub,
                   std::vector<std::string> overrides) {
    const std::string cfg = (again / (sub + ".json")).string();
    WriteFile(cfg, ReadFile(ManifestPath(artifact)));
    std::vector<std::string> args = {sub, "--config", cfg};
    args.insert(args.end(), overrides.begin(), overrides.end());
    const CliRun r = Cli(args);
    EXPECT_EQ(r.code, 0) << sub << ": " << r.err;
  };
  const std::string corpus2 = (again / "corpus.jsonl").string();
  rerun(dir / "fx", "synth-corpus", {"--out", (again / "fx").string(), "--corpus", corpus2});
  EXPECT_EQ(ReadFile(corpus2), ReadFile(corpus));
  const std::string model2 = (again / "model.json").string();
  rerun(model, "train", {"--corpus", corpus2, "--out", model2});
  EXPECT_EQ(ReadFile(model2), ReadFile(model));
  const std::string report2 = (again / "report").string();
  rerun(report, "evaluate", {"--corpus", corpus2, "--model", model2, "--out", report2});
  EXPECT_EQ(ReadFile(std::filesystem::path(report2) / "report.json"),
            ReadFile(std::filesystem::path(report) / "report.json"));

  // A manifest from another stage is refused.
  const CliRun wrong = Cli({"train", "--config", ManifestPath(report).string()});
  EXPECT_EQ(wrong.code, 2);
}

TEST(CliTest, EvaluateRefusesOtherFeatureSchema) {
  TempDir dir;
  const std::string fx = (dir / "fx").string();
  const std::string corpus = (dir / "fx" / "corpus.jsonl").string();
  ASSERT_EQ(Cli({"synth-corpus", "--out", fx, "--n", "300"}).code, 0);
  ASSERT_EQ(Cli({"train", "--corpus", corpus, "--out", (dir / "m.json").string()}).code, 0);
  TrainedModel m = TrainedModel::Load(dir / "m.json");
  m.feature_schema_version = "vs-features/0";
  m.Save(dir / "old.json");
  const CliRun r = Cli({"evaluate", "--model", (dir / "old.json").string(), "--corpus", corpus,
                     "--out", (dir / "r").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("SchemaMismatch"), std::string::npos) << r.err;
}

TEST(CliTest, ReplayLatencyEdgeCases) {
  TempDir dir;
  const std::string fx = (dir / "fx").string();
  ASSERT_EQ(Cli({"synth-corpus", "--out", fx, "--n", "200"}).code, 0);
  ASSERT_EQ(Cli({"train", "--corpus", (dir / "fx" / "corpus.jsonl").string(), "--out",
                 (dir / "m.json").string()})
                .code,
            0);
  const std::string csv = (dir / "lat.csv").string();
  const CliRun empty = Cli({"replay-latency", "--fixture", fx, "--model", (dir / "m.json").string(),
                         "--n", "0", "--out", csv});
  ASSERT_EQ(empty.code, 0) << empty.err;
  EXPECT_EQ(ReadFile(csv), "mode,seconds_per_revision,batch_size\n");

  const CliRun small = Cli({"replay-latency", "--fixture", fx, "--model", (dir / "m.json").string(),
                         "--n", "60", "--out", csv});
  ASSERT_EQ(small.code, 0) << small.err;
  const std::string text = ReadFile(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 60 + 2 + 60);

  const CliRun down = Cli({"replay-latency", "--fixture", fx, "--model", (dir / "m.json").string(),
                        "--service", "http://127.0.0.1:1", "--n", "5", "--out", csv});
  EXPECT_EQ(down.code, 4) << down.err;
}

}  // namespace
}  // namespace vsentinel
