// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file report.hpp
 * @brief Reference-metric evaluation of pipeline outputs and plain-text
 *        report tables.
 */

#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/finetune.hpp"
#include "tods/judge.hpp"
#include "tods/metrics.hpp"
#include "tods/types.hpp"

namespace tods {

inline constexpr const char* kBestSelected = "Best Selected";

/// Metrics of `candidates` against `references`, both keyed by dialogue id.
/// Throws kInvalidArgument listing ids present on one side only.
metrics::MetricReport evaluate_references(const std::map<std::string, std::string>& candidates,
                                          const std::map<std::string, std::string>& references);

struct MetricsRow {
  std::string system;
  metrics::MetricReport report;

  nlohmann::json to_json() const;
};

/// One row per summarizer (pool order) plus a "Best Selected" row.
/// Throws kPrecondition when a dialogue has no reference summary.
std::vector<MetricsRow> evaluate_systems(const std::vector<Dialogue>& corpus,
                                         const std::vector<std::string>& summarizers,
                                         const std::vector<SummaryCandidate>& summaries,
                                         const std::vector<SelectionRecord>& selections);

/// Mean and sample standard deviation of each metric over several reports.
nlohmann::json aggregate_reports(const std::vector<metrics::MetricReport>& reports);

std::string render_metrics_table(const std::vector<MetricsRow>& rows);
std::string render_judge_table(const std::vector<JudgeRow>& rows);
std::string render_win_rates(const FinetuneChoice& choice);

}  // namespace tods
