// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/datastore.hpp"

#include <array>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "tods/digest.hpp"
#include "tods/error.hpp"

namespace fs = std::filesystem;

namespace tods {
namespace {

constexpr std::array<std::pair<Stage, const char*>, 10> kStageNames{{
    {Stage::kCorpus, "corpus"},
    {Stage::kSummaries, "summaries"},
    {Stage::kQa, "qa"},
    {Stage::kAnswers, "answers"},
    {Stage::kStage1, "stage1"},
    {Stage::kStage2, "stage2"},
    {Stage::kFinetune, "finetune"},
    {Stage::kJudge, "judge"},
    {Stage::kMetrics, "metrics"},
    {Stage::kPoolSweep, "pool_sweep"},
}};

std::string digest_sidecar(const std::string& digest, const std::string& file) {
  return digest + "  " + file + "\n";
}

std::string read_digest_sidecar(const fs::path& path) {
  const auto text = read_file(path);
  const auto space = text.find(' ');
  if (space == std::string::npos) {
    throw Error(ErrorKind::kCorruption, "malformed digest file " + path.string());
  }
  return text.substr(0, space);
}

std::string optional_field(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string("-");
}

}  // namespace

std::string stage_name(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "unknown";
}

Stage stage_from_name(const std::string& name) {
  for (const auto& [s, n] : kStageNames) {
    if (name == n) return s;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown stage '" + name + "'");
}

std::string stage_file(Stage stage) { return stage_name(stage) + ".jsonl"; }

std::string encode_record(const nlohmann::json& record) {
  return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

// ---------------------------------------------------------------------------
// CacheKey / ExchangeRecord
// ---------------------------------------------------------------------------

std::string CacheKey::canonical() const {
  // Length-prefixed so that no two field tuples share an encoding.
  std::ostringstream os;
  for (const auto& field : {stage, dialogue_id, optional_field(question), model,
                            optional_field(sample), std::to_string(attempt), template_digest,
                            prompt_digest}) {
    os << field.size() << ':' << field << ';';
  }
  return os.str();
}

std::string CacheKey::file_stem() const { return sha256_hex(canonical()); }

nlohmann::json CacheKey::to_json() const {
  nlohmann::json j = {{"stage", stage},
                      {"dialogue_id", dialogue_id},
                      {"model", model},
                      {"attempt", attempt},
                      {"template_digest", template_digest},
                      {"prompt_digest", prompt_digest}};
  j["question"] = question ? nlohmann::json(*question) : nlohmann::json(nullptr);
  j["sample"] = sample ? nlohmann::json(*sample) : nlohmann::json(nullptr);
  return j;
}

CacheKey CacheKey::from_json(const nlohmann::json& j) {
  CacheKey k;
  k.stage = j.at("stage").get<std::string>();
  k.dialogue_id = j.at("dialogue_id").get<std::string>();
  k.model = j.at("model").get<std::string>();
  k.attempt = j.at("attempt").get<std::int64_t>();
  k.template_digest = j.at("template_digest").get<std::string>();
  k.prompt_digest = j.at("prompt_digest").get<std::string>();
  if (!j.at("question").is_null()) k.question = j.at("question").get<std::int64_t>();
  if (!j.at("sample").is_null()) k.sample = j.at("sample").get<std::int64_t>();
  return k;
}

nlohmann::json ExchangeRecord::to_json() const {
  return {{"key", key.to_json()},         {"request", request},
          {"text", text},                 {"finish_reason", finish_reason},
          {"latency_ms", latency_ms},     {"usage", usage},
          {"attempts", attempts}};
}

ExchangeRecord ExchangeRecord::from_json(const nlohmann::json& j) {
  ExchangeRecord r;
  r.key = CacheKey::from_json(j.at("key"));
  r.request = j.at("request");
  r.text = j.at("text").get<std::string>();
  r.finish_reason = j.at("finish_reason").get<std::string>();
  r.latency_ms = j.at("latency_ms").get<double>();
  r.usage = j.at("usage");
  r.attempts = j.at("attempts").get<int>();
  return r;
}

// ---------------------------------------------------------------------------
// ExchangeCache
// ---------------------------------------------------------------------------

ExchangeCache::ExchangeCache(fs::path directory) : directory_(std::move(directory)) {
  fs::create_directories(*directory_);
}

std::optional<ExchangeRecord> ExchangeCache::lookup(const CacheKey& key) const {
  const auto stem = key.file_stem();
  {
    std::shared_lock lock(mutex_);
    auto it = memory_.find(stem);
    if (it != memory_.end()) {
      ++hits_;
      return it->second;
    }
  }
  if (directory_) {
    const auto path = *directory_ / (stem + ".json");
    std::error_code ec;
    if (fs::exists(path, ec)) {
      ExchangeRecord record;
      try {
        record = ExchangeRecord::from_json(nlohmann::json::parse(read_file(path)));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kCorruption, "unreadable cache entry " + path.string() + ": " +
                                                e.what());
      }
      if (!(record.key == key)) {
        throw Error(ErrorKind::kCorruption, "cache entry " + path.string() + " has a foreign key");
      }
      std::unique_lock lock(mutex_);
      memory_.emplace(stem, record);
      ++hits_;
      return record;
    }
  }
  ++misses_;
  return std::nullopt;
}

ExchangeRecord ExchangeCache::require(const CacheKey& key) const {
  auto hit = lookup(key);
  if (!hit) {
    throw Error(ErrorKind::kReplayIncomplete, "no cached exchange for " + key.to_json().dump());
  }
  return *hit;
}

void ExchangeCache::record(const ExchangeRecord& exchange) {
  const auto stem = exchange.key.file_stem();
  std::unique_lock lock(mutex_);
  if (!memory_.emplace(stem, exchange).second) return;
  lock.unlock();
  if (directory_) {
    const auto path = *directory_ / (stem + ".json");
    std::error_code ec;
    if (!fs::exists(path, ec)) atomic_write(path, exchange.to_json().dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void atomic_write(const fs::path& path, const std::string& content) {
  static std::atomic<std::uint64_t> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::kInvalidArgument, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Datastore
// ---------------------------------------------------------------------------

namespace {
std::string validated_run_id(std::string run_id) {
  if (run_id.empty() || run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
    throw Error(ErrorKind::kInvalidArgument, "invalid run id '" + run_id + "'");
  }
  return run_id;
}
}  // namespace

Datastore::Datastore(fs::path root, std::string run_id, bool resume)
    : root_(std::move(root)),
      run_id_(validated_run_id(std::move(run_id))),
      resume_(resume),
      cache_(root_ / run_id_ / "exchanges") {}

bool Datastore::has_artifact(Stage stage) const {
  return fs::exists(run_dir() / stage_file(stage));
}

StageArtifact Datastore::put_artifact(Stage stage, const std::vector<nlohmann::json>& records) {
  std::string content;
  for (const auto& r : records) {
    content += encode_record(r);
    content.push_back('\n');
  }
  const auto digest = sha256_hex(content);
  const auto file = stage_file(stage);
  const auto path = run_dir() / file;

  if (fs::exists(path)) {
    if (!resume_) {
      throw Error(ErrorKind::kAlreadyFinalized,
                  file + " already exists in run '" + run_id_ + "' (use --resume)");
    }
    if (artifact_digest(stage) != digest) {
      throw Error(ErrorKind::kAlreadyFinalized,
                  file + " already finalized with different content in run '" + run_id_ + "'");
    }
    return StageArtifact{run_id_, stage, records, digest};
  }
  atomic_write(path, content);
  atomic_write(run_dir() / (file + ".sha256"), digest_sidecar(digest, file));
  return StageArtifact{run_id_, stage, records, digest};
}

std::string Datastore::artifact_digest(Stage stage) const {
  const auto file = stage_file(stage);
  const auto sidecar = run_dir() / (file + ".sha256");
  if (!fs::exists(sidecar)) {
    throw Error(ErrorKind::kCorruption, "missing digest for " + file);
  }
  return read_digest_sidecar(sidecar);
}

StageArtifact Datastore::get_artifact(Stage stage) const {
  const auto file = stage_file(stage);
  const auto path = run_dir() / file;
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kNotFound, file + " not found in run '" + run_id_ + "'");
  }
  const auto content = read_file(path);
  const auto expected = artifact_digest(stage);
  const auto actual = sha256_hex(content);
  if (expected != actual) {
    throw Error(ErrorKind::kCorruption, file + " digest mismatch (expected " + expected +
                                            ", found " + actual + ")");
  }
  StageArtifact artifact{run_id_, stage, {}, actual};
  std::istringstream lines(content);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    try {
      artifact.records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kCorruption,
                  file + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return artifact;
}

void Datastore::put_sidecar(const std::string& name, const nlohmann::json& doc) {
  atomic_write(run_dir() / name, doc.dump(2) + "\n");
}

nlohmann::json Datastore::get_sidecar(const std::string& name) const {
  return nlohmann::json::parse(read_file(run_dir() / name));
}

}  // namespace tods
