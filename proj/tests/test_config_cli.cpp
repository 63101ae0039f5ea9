// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <gtest/gtest.h>

#include <filesystem>

#include "tods/config.hpp"
#include "tods/datastore.hpp"
#include "tods/dispatch.hpp"
#include "tods/error.hpp"
#include "tods/synthetic.hpp"

using namespace tods;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal_config() {
  return nlohmann::json::parse(R"({
    "registry": {"models": [{"name": "m1", "backend": "mock"}, {"name": "m2", "backend": "mock"}],
                 "mock": {"default": {"kind": "planted"}}},
    "dataset": {"path": "corpus.jsonl", "format": "native"}
  })");
}

Error config_error(const nlohmann::json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected a config error for " << doc.dump();
  return Error(ErrorKind::kInvalidArgument, "");
}

/// A synthetic corpus and mock config written under a fresh directory.
struct Workspace {
  fs::path dir;
  RunConfig config;

  Workspace(const std::string& name, std::size_t dialogues, std::size_t facts = 3) {
    dir = fs::temp_directory_path() / ("tods_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    SyntheticOptions shape;
    shape.dialogues = dialogues;
    shape.facts = facts;
    write_corpus((dir / "corpus.jsonl").string(), synthetic_corpus(shape));
    SyntheticPool pool;
    pool.names = {"model-a", "model-b", "model-c"};
    pool.coverages = {1.0, 0.5, 0.2};
    config = parse_config(synthetic_config(pool, "corpus.jsonl", "runs"), dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  DispatchOptions options(const std::string& command, const std::string& run = "r") const {
    DispatchOptions o;
    o.command = command;
    o.config = config;
    o.run_id = run;
    return o;
  }
  fs::path run_dir(const std::string& run = "r") const { return dir / "runs" / run; }
};

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse_config(minimal_config());
  EXPECT_EQ(cfg.pipeline.samples, 5u);
  EXPECT_DOUBLE_EQ(cfg.pipeline.alpha_self, 0.8);
  EXPECT_EQ(cfg.pipeline.parallelism, 1u);
  EXPECT_EQ(cfg.registry.size(), 2u);
  EXPECT_EQ(cfg.judges().size(), 2u);
  EXPECT_TRUE(cfg.pipeline.templates.qa_include_task_prompt);
}

TEST(Config, Validation) {
  auto doc = minimal_config();
  doc["pipeline"] = {{"alpha_self", 1.5}};
  EXPECT_EQ(config_error(doc).kind(), ErrorKind::kConfig);
  doc["pipeline"] = {{"N", 0}};
  EXPECT_EQ(config_error(doc).kind(), ErrorKind::kConfig);
  doc["pipeline"] = {{"parallelism", 0}};
  EXPECT_EQ(config_error(doc).kind(), ErrorKind::kConfig);

  doc = minimal_config();
  doc["registry"]["models"][1]["name"] = "m1";
  EXPECT_NE(std::string(config_error(doc).what()).find("duplicate"), std::string::npos);

  doc = minimal_config();
  doc["pipelines"] = nlohmann::json::object();
  const auto e = config_error(doc);
  EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  EXPECT_NE(std::string(e.what()).find("pipelines"), std::string::npos);

  doc = minimal_config();
  doc["registry"].erase("mock");
  EXPECT_EQ(config_error(doc).kind(), ErrorKind::kConfig);
}

TEST(Config, NoCredentialField) {
  auto doc = minimal_config();
  doc["registry"]["models"][0] = {{"name", "remote"}, {"backend", "remote"},
                                  {"endpoint", "https://example.invalid/v1/chat/completions"},
                                  {"api_key", "sk-secret"}};
  EXPECT_EQ(config_error(doc).kind(), ErrorKind::kConfig);
}

TEST(Config, SimsamuProfileOmitsTaskPromptFromQa) {
  auto doc = minimal_config();
  doc["dataset"]["profile"] = "simsamu";
  EXPECT_FALSE(parse_config(doc).pipeline.templates.qa_include_task_prompt);
}

TEST(Cli, RunAllOnTwoDialogues) {
  Workspace ws("runall", 2);
  const auto r = dispatch(ws.options("run-all"));
  ASSERT_EQ(r.exit_status, 0) << r.error;
  EXPECT_GT(r.backend_calls, 0u);
  for (const char* f : {"corpus.jsonl", "summaries.jsonl", "qa.jsonl", "answers.jsonl",
                        "stage1.jsonl", "stage2.jsonl", "finetune.jsonl", "finetune.meta.json",
                        "judge.jsonl", "metrics.jsonl"}) {
    EXPECT_TRUE(fs::exists(ws.run_dir() / f)) << f;
  }
  Datastore ds(ws.dir / "runs", "r");
  EXPECT_EQ(ds.get_artifact(Stage::kStage2).records.size(), 2u);
  EXPECT_EQ(ds.get_artifact(Stage::kSummaries).records.size(), 6u);
}

TEST(Cli, StageWithoutUpstreamIsPrecondition) {
  Workspace ws("precondition", 2);
  try {
    run_command(ws.options("stage2"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecondition);
    EXPECT_NE(std::string(e.what()).find("stage1"), std::string::npos);
  }
  EXPECT_EQ(dispatch(ws.options("stage2")).exit_status, 1);
}

TEST(Cli, UnknownCommandIsUsageError) {
  Workspace ws("usage", 1);
  try {
    run_command(ws.options("stage3"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

TEST(Cli, PoolSweepOfSizeTwo) {
  Workspace ws("sweep", 2);
  auto o = ws.options("pool-sweep");
  o.size = 2;
  const auto r = dispatch(o);
  ASSERT_EQ(r.exit_status, 0) << r.error;
  Datastore ds(ws.dir / "runs", "r");
  const auto rows = ds.get_artifact(Stage::kPoolSweep).records;
  ASSERT_EQ(rows.size(), 4u);  // C(3,2) subsets plus the aggregate
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rows[i]["subset"].size(), 2u);
  EXPECT_TRUE(rows[3]["aggregate"].get<bool>());

  o.size = 4;
  o.run_id = "r2";
  EXPECT_EQ(dispatch(o).exit_status, 1);
}

TEST(Cli, ResumeIsIdempotent) {
  Workspace ws("resume", 2);
  ASSERT_EQ(dispatch(ws.options("run-all")).exit_status, 0);
  Datastore ds(ws.dir / "runs", "r");
  const auto digest = ds.artifact_digest(Stage::kStage2);

  // Without --resume a finalized stage is not rewritten.
  EXPECT_EQ(dispatch(ws.options("generate-summaries")).exit_status, 1);

  auto o = ws.options("run-all");
  o.resume = true;
  const auto again = dispatch(o);
  ASSERT_EQ(again.exit_status, 0) << again.error;
  EXPECT_EQ(again.backend_calls, 0u);
  EXPECT_EQ(ds.artifact_digest(Stage::kStage2), digest);
}

TEST(Cli, SeedChangesShufflesButNotTheWinner) {
  Workspace ws("seed", 2);
  auto a = ws.options("run-all", "s0");
  auto b = ws.options("run-all", "s1");
  b.seed = 99;
  ASSERT_EQ(dispatch(a).exit_status, 0);
  ASSERT_EQ(dispatch(b).exit_status, 0);
  Datastore da(ws.dir / "runs", "s0"), db(ws.dir / "runs", "s1");
  const auto ra = da.get_artifact(Stage::kStage2).records;
  const auto rb = db.get_artifact(Stage::kStage2).records;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i]["best_summarizer"], "model-a");
    EXPECT_EQ(rb[i]["best_summarizer"], "model-a");
  }
}
