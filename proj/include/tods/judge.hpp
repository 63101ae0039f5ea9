// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/pipeline.hpp"

namespace tods {

/// A summary put in front of the judges; `system` is a summarizer name,
/// "best_selected" or "reference".
struct JudgedSummary {
  std::string dialogue_id;
  std::string system;
  std::string text;
};

struct JudgeScore {
  std::string dialogue_id;
  std::string system;
  std::string judge;
  Role dimension = Role::kJudgeCoherence;
  std::optional<int> score;  // nullopt when every attempt failed to parse
  int attempts = 1;

  nlohmann::json to_json() const;
  static JudgeScore from_json(const nlohmann::json& j);
};

/// One row of the judge report: mean score per dimension over judges and
/// dialogues, their average, and the count of missing scores.
struct JudgeRow {
  std::string system;
  std::map<Role, double> dimension_mean;
  double average = 0.0;
  std::size_t scored = 0;
  std::size_t missing = 0;

  nlohmann::json to_json() const;
};

/// Every (dialogue, summary, dimension) prompted once per judge, with parse retries.
std::vector<JudgeScore> judge_summaries(Gateway& gateway, const ModelRegistry& judges,
                                        const std::vector<Dialogue>& dialogues,
                                        const std::vector<JudgedSummary>& summaries,
                                        const PipelineOptions& options);

/// Rows in first-appearance order of systems.
std::vector<JudgeRow> summarize_judge_scores(const std::vector<JudgeScore>& scores);

}  // namespace tods
