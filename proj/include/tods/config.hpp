// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file config.hpp
 * @brief Run configuration: a JSON document with nested sections.
 *
 * {
 *   "registry": {"models": [{"name", "backend": "mock"|"remote", "endpoint"?, "remote_model"?}],
 *                "decoding": {...}, "mock": {...}},
 *   "judges": ["pool name" | {model entry}],
 *   "dataset": {"path", "format", "profile", "task_prompt"?, "qa_include_task_prompt"?},
 *   "templates": {"<role>": {"instruction", "input"} | "<file>"},
 *   "pipeline": {"N", "alpha_self", "global_seed", "parallelism", "max_parse_retries"},
 *   "gateway": {"max_retries", "backoff_ms", "max_in_flight", "timeout_s"},
 *   "store": {"root"}
 * }
 * Unknown keys are rejected. Relative paths resolve against the config file.
 */

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/corpus.hpp"
#include "tods/gateway.hpp"
#include "tods/mock.hpp"
#include "tods/pipeline.hpp"

namespace tods {

struct DatasetConfig {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::kNative;
  std::string profile = "samsum";
  /// Task prompt for records that carry none.
  std::string task_prompt;
};

struct RunConfig {
  ModelRegistry registry;
  /// Judge models outside the pool; judges() adds pool members named in config.
  std::vector<ModelEntry> judge_entries;
  std::vector<std::string> judge_names;
  MockScript mock;
  DatasetConfig dataset;
  PipelineOptions pipeline;
  GatewayOptions gateway;
  std::chrono::seconds timeout{120};
  std::filesystem::path store_root = "runs";

  /// Pool plus judge-only models; what the gateway serves.
  ModelRegistry gateway_registry() const;
  /// Judges in config order; the whole pool when none are listed.
  ModelRegistry judges() const;
};

/// Throws kConfig naming the offending key and its constraint.
RunConfig parse_config(const nlohmann::json& doc,
                       const std::filesystem::path& base_dir = std::filesystem::path("."));
RunConfig load_config(const std::filesystem::path& path);

}  // namespace tods
