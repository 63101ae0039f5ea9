// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "tods/datastore.hpp"
#include "tods/error.hpp"

using namespace tods;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tods_ds_" + name);
  fs::remove_all(dir);
  return dir;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kInvalidArgument;
}

std::vector<nlohmann::json> answer_records(std::size_t n) {
  std::vector<nlohmann::json> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({{"dialogue_id", "d" + std::to_string(i / 27)},
                   {"question_index", i % 10 + 1},
                   {"text", "answer \"" + std::to_string(i) + "\" \xc3\xa9"}});
  }
  return out;
}

}  // namespace

TEST(Datastore, StageNamesRoundTrip) {
  for (auto s : {Stage::kCorpus, Stage::kSummaries, Stage::kQa, Stage::kAnswers, Stage::kStage1,
                 Stage::kStage2, Stage::kFinetune, Stage::kJudge, Stage::kMetrics,
                 Stage::kPoolSweep}) {
    EXPECT_EQ(stage_from_name(stage_name(s)), s);
  }
  EXPECT_EQ(kind_of([] { stage_from_name("stage3"); }), ErrorKind::kInvalidArgument);
}

TEST(Datastore, RoundTripAndDigest) {
  const auto root = fresh_dir("roundtrip");
  Datastore ds(root, "run");
  const auto records = answer_records(270);
  const auto put = ds.put_artifact(Stage::kAnswers, records);
  EXPECT_EQ(put.digest.size(), 64u);
  const auto got = ds.get_artifact(Stage::kAnswers);
  EXPECT_EQ(got.records, records);
  EXPECT_EQ(got.digest, put.digest);
  EXPECT_EQ(ds.artifact_digest(Stage::kAnswers), put.digest);
  EXPECT_TRUE(ds.has_artifact(Stage::kAnswers));
  EXPECT_FALSE(ds.has_artifact(Stage::kStage1));
  fs::remove_all(root);
}

TEST(Datastore, TamperAndMissing) {
  const auto root = fresh_dir("tamper");
  Datastore ds(root, "run");
  ds.put_artifact(Stage::kQa, answer_records(5));
  {
    std::ofstream out(ds.run_dir() / stage_file(Stage::kQa), std::ios::app);
    out << "{\"injected\":true}\n";
  }
  EXPECT_EQ(kind_of([&] { ds.get_artifact(Stage::kQa); }), ErrorKind::kCorruption);
  EXPECT_EQ(kind_of([&] { ds.get_artifact(Stage::kStage2); }), ErrorKind::kNotFound);
  fs::remove(ds.run_dir() / (stage_file(Stage::kQa) + ".sha256"));
  EXPECT_EQ(kind_of([&] { ds.get_artifact(Stage::kQa); }), ErrorKind::kCorruption);
  fs::remove_all(root);
}

TEST(Datastore, FinalizedArtifactsAreImmutable) {
  const auto root = fresh_dir("final");
  const auto records = answer_records(12);
  {
    Datastore ds(root, "run");
    ds.put_artifact(Stage::kSummaries, records);
    EXPECT_EQ(kind_of([&] { ds.put_artifact(Stage::kSummaries, records); }),
              ErrorKind::kAlreadyFinalized);
  }
  Datastore resumed(root, "run", true);
  const auto before = read_file(resumed.run_dir() / stage_file(Stage::kSummaries));
  EXPECT_NO_THROW(resumed.put_artifact(Stage::kSummaries, records));
  EXPECT_EQ(read_file(resumed.run_dir() / stage_file(Stage::kSummaries)), before);
  auto changed = records;
  changed[3]["text"] = "different";
  EXPECT_EQ(kind_of([&] { resumed.put_artifact(Stage::kSummaries, changed); }),
            ErrorKind::kAlreadyFinalized);
  fs::remove_all(root);
}

TEST(Datastore, RunIdValidation) {
  EXPECT_EQ(kind_of([] { Datastore(fresh_dir("id"), "../x"); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { Datastore(fresh_dir("id"), ""); }), ErrorKind::kInvalidArgument);
}

TEST(Datastore, Sidecar) {
  const auto root = fresh_dir("sidecar");
  Datastore ds(root, "run");
  const nlohmann::json doc = {{"model", "m"}, {"count", 3}};
  ds.put_sidecar("meta.json", doc);
  EXPECT_EQ(ds.get_sidecar("meta.json"), doc);
  fs::remove_all(root);
}

// ---------------------------------------------------------------------------

namespace {

CacheKey base_key() {
  return CacheKey{"stage1/a", "d1", 2, "m", 1, 0, "tdigest", "pdigest"};
}

}  // namespace

TEST(CacheKey, EveryFieldChangesTheStem) {
  std::set<std::string> stems;
  std::vector<CacheKey> variants(9, base_key());
  variants[1].stage = "stage2";
  variants[2].dialogue_id = "d2";
  variants[3].question = std::nullopt;
  variants[4].model = "n";
  variants[5].sample = std::nullopt;
  variants[6].attempt = 1;
  variants[7].template_digest = "other";
  variants[8].prompt_digest = "other";
  for (const auto& k : variants) stems.insert(k.file_stem());
  EXPECT_EQ(stems.size(), variants.size());
}

TEST(CacheKey, CanonicalEncodingIsInjective) {
  // Field boundaries cannot be shifted to collide.
  CacheKey a = base_key(), b = base_key();
  a.stage = "ab";
  a.dialogue_id = "c";
  b.stage = "a";
  b.dialogue_id = "bc";
  EXPECT_NE(a.canonical(), b.canonical());
  CacheKey c = base_key(), d = base_key();
  c.question = std::nullopt;
  c.sample = 1;
  d.question = 1;
  d.sample = std::nullopt;
  EXPECT_NE(c.canonical(), d.canonical());
}

TEST(CacheKey, JsonRoundTrip) {
  auto k = base_key();
  EXPECT_EQ(CacheKey::from_json(k.to_json()), k);
  k.question = std::nullopt;
  k.sample = std::nullopt;
  EXPECT_EQ(CacheKey::from_json(k.to_json()), k);
}

TEST(ExchangeCache, PersistsAcrossInstances) {
  const auto dir = fresh_dir("cache");
  ExchangeRecord rec;
  rec.key = base_key();
  rec.request = {{"messages", nlohmann::json::array()}};
  rec.text = "reply";
  rec.finish_reason = "stop";
  {
    ExchangeCache cache(dir);
    EXPECT_FALSE(cache.lookup(rec.key));
    cache.record(rec);
  }
  ExchangeCache again(dir);
  const auto hit = again.lookup(rec.key);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->text, "reply");
  EXPECT_EQ(hit->key, rec.key);
  auto other = base_key();
  other.template_digest = "changed";
  EXPECT_FALSE(again.lookup(other));
  try {
    again.require(other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kReplayIncomplete);
  }
  fs::remove_all(dir);
}

TEST(ExchangeCache, ForeignEntryIsCorruption) {
  const auto dir = fresh_dir("foreign");
  ExchangeRecord rec;
  rec.key = base_key();
  rec.text = "x";
  {
    ExchangeCache cache(dir);
    cache.record(rec);
  }
  // Move the entry under another key's file name.
  auto other = base_key();
  other.model = "z";
  fs::rename(dir / (rec.key.file_stem() + ".json"), dir / (other.file_stem() + ".json"));
  ExchangeCache again(dir);
  try {
    again.lookup(other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorruption);
  }
  fs::remove_all(dir);
}
