// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file datastore.hpp
 * @brief Run directory layout, append-only stage artifacts, and the exchange
 *        cache used for resume and replay.
 *
 * Layout: <root>/<run_id>/<stage>.jsonl with a sha256sum-compatible
 * <stage>.jsonl.sha256 sidecar, and <root>/<run_id>/exchanges/<key>.json.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace tods {

enum class Stage {
  kCorpus,
  kSummaries,
  kQa,
  kAnswers,
  kStage1,
  kStage2,
  kFinetune,
  kJudge,
  kMetrics,
  kPoolSweep,
};

std::string stage_name(Stage stage);
Stage stage_from_name(const std::string& name);
std::string stage_file(Stage stage);

struct StageArtifact {
  std::string run_id;
  Stage stage = Stage::kCorpus;
  std::vector<nlohmann::json> records;
  std::string digest;
};

/// Canonical line encoding of a record; the byte format of every artifact file.
std::string encode_record(const nlohmann::json& record);

/// Identifies one model exchange.
struct CacheKey {
  std::string stage;
  std::string dialogue_id;
  std::optional<std::int64_t> question;
  std::string model;
  std::optional<std::int64_t> sample;
  std::int64_t attempt = 0;
  std::string template_digest;
  std::string prompt_digest;

  /// Field-by-field encoding; equal keys have equal encodings and vice versa.
  std::string canonical() const;
  /// Cache file stem (sha256 of canonical()).
  std::string file_stem() const;
  nlohmann::json to_json() const;
  static CacheKey from_json(const nlohmann::json& j);

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct ExchangeRecord {
  CacheKey key;
  nlohmann::json request;
  std::string text;
  std::string finish_reason;
  double latency_ms = 0.0;
  nlohmann::json usage;  // null when the backend did not report it
  int attempts = 1;

  nlohmann::json to_json() const;
  static ExchangeRecord from_json(const nlohmann::json& j);
};

/// Write-once exchange cache. Disk-backed when constructed with a directory,
/// memory-only otherwise. Concurrent readers; atomic create-then-rename writes.
class ExchangeCache {
 public:
  ExchangeCache() = default;
  explicit ExchangeCache(std::filesystem::path directory);

  std::optional<ExchangeRecord> lookup(const CacheKey& key) const;
  /// Lookup that converts a miss into kReplayIncomplete.
  ExchangeRecord require(const CacheKey& key) const;
  /// Records an exchange; an existing entry for the key is left untouched.
  void record(const ExchangeRecord& exchange);

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }

 private:
  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, ExchangeRecord> memory_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

/// Writes `content` to `path` via a temporary file and rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

class Datastore {
 public:
  /// `resume` permits re-putting a finalized stage with identical records.
  Datastore(std::filesystem::path root, std::string run_id, bool resume = false);

  const std::string& run_id() const noexcept { return run_id_; }
  std::filesystem::path run_dir() const { return root_ / run_id_; }
  bool resume() const noexcept { return resume_; }

  bool has_artifact(Stage stage) const;
  /// Finalizes a stage. Throws kAlreadyFinalized when the stage exists and
  /// either resume is off or the records differ.
  StageArtifact put_artifact(Stage stage, const std::vector<nlohmann::json>& records);
  /// Throws kNotFound for a missing stage and kCorruption on digest mismatch.
  StageArtifact get_artifact(Stage stage) const;
  std::string artifact_digest(Stage stage) const;

  /// Extra JSON documents stored next to the stage files (e.g. export metadata).
  void put_sidecar(const std::string& name, const nlohmann::json& doc);
  nlohmann::json get_sidecar(const std::string& name) const;

  ExchangeCache& cache() noexcept { return cache_; }

 private:
  std::filesystem::path root_;
  std::string run_id_;
  bool resume_;
  ExchangeCache cache_;
};

}  // namespace tods
