// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/report.hpp"

#include <cmath>
#include <set>

#include <spdlog/fmt/fmt.h>

#include "tods/error.hpp"

namespace tods {
namespace {

const std::vector<std::string> kMetricOrder = {"rouge1", "rouge2", "rougeL", "bleu"};

std::string cell(const metrics::MetricValue& v) {
  if (!v.has_interval) return fmt::format("{:.2f}", v.score);
  return fmt::format("{:.2f} ± {:.2f}", v.score, v.halfwidth);
}

}  // namespace

metrics::MetricReport evaluate_references(const std::map<std::string, std::string>& candidates,
                                          const std::map<std::string, std::string>& references) {
  std::string unpaired;
  for (const auto& [id, _] : candidates) {
    if (!references.count(id)) unpaired += (unpaired.empty() ? "" : ", ") + id;
  }
  for (const auto& [id, _] : references) {
    if (!candidates.count(id)) unpaired += (unpaired.empty() ? "" : ", ") + id;
  }
  if (!unpaired.empty()) throw Error(ErrorKind::kInvalidArgument, "unpaired ids: " + unpaired);
  std::vector<std::string> cand, ref;
  for (const auto& [id, text] : candidates) {
    cand.push_back(text);
    ref.push_back(references.at(id));
  }
  return metrics::evaluate_corpus(cand, ref);
}

nlohmann::json MetricsRow::to_json() const {
  auto j = report.to_json();
  j["system"] = system;
  return j;
}

std::vector<MetricsRow> evaluate_systems(const std::vector<Dialogue>& corpus,
                                         const std::vector<std::string>& summarizers,
                                         const std::vector<SummaryCandidate>& summaries,
                                         const std::vector<SelectionRecord>& selections) {
  std::map<std::string, std::string> references;
  std::string missing;
  for (const auto& d : corpus) {
    if (d.reference) {
      references[d.id] = *d.reference;
    } else {
      missing += (missing.empty() ? "" : ", ") + d.id;
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::kPrecondition, "no reference summary for dialogues: " + missing);
  }
  std::vector<MetricsRow> rows;
  for (const auto& name : summarizers) {
    std::map<std::string, std::string> candidates;
    for (const auto& s : summaries) {
      if (s.summarizer == name) candidates[s.dialogue_id] = s.text;
    }
    rows.push_back(MetricsRow{name, evaluate_references(candidates, references)});
  }
  std::map<std::string, std::string> best;
  for (const auto& r : selections) best[r.dialogue_id] = r.summary;
  rows.push_back(MetricsRow{kBestSelected, evaluate_references(best, references)});
  return rows;
}

nlohmann::json aggregate_reports(const std::vector<metrics::MetricReport>& reports) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& metric : kMetricOrder) {
    std::vector<double> xs;
    for (const auto& r : reports) {
      auto it = r.values.find(metric);
      if (it != r.values.end()) xs.push_back(it->second.score);
    }
    if (xs.empty()) continue;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    out[metric] = {{"mean", mean}, {"stddev", sd}, {"subsets", xs.size()}};
  }
  return out;
}

std::string render_metrics_table(const std::vector<MetricsRow>& rows) {
  std::string out = "| System | R-1 | R-2 | R-L | BLEU |\n|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out += "| " + row.system;
    for (const auto& metric : kMetricOrder) {
      auto it = row.report.values.find(metric);
      out += " | " + (it == row.report.values.end() ? std::string("-") : cell(it->second));
    }
    out += " |\n";
  }
  return out;
}

std::string render_judge_table(const std::vector<JudgeRow>& rows) {
  const Role dims[] = {Role::kJudgeCoherence, Role::kJudgeConsistency, Role::kJudgeFluency,
                       Role::kJudgeRelevance};
  std::string out = "| System | COH | CON | FLU | REL | Avg | missing |\n"
                    "|---|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out += "| " + row.system;
    for (auto d : dims) {
      auto it = row.dimension_mean.find(d);
      out += " | " + (it == row.dimension_mean.end() ? std::string("-")
                                                     : fmt::format("{:.2f}", it->second));
    }
    out += fmt::format(" | {:.2f} | {} |\n", row.average, row.missing);
  }
  return out;
}

std::string render_win_rates(const FinetuneChoice& choice) {
  std::string out = "| Summarizer | Wins | Win rate | Mean stage-2 total |\n|---|---|---|---|\n";
  for (const auto& w : choice.table) {
    out += fmt::format("| {} | {} | {:.1f}% | {:.4f} |\n", w.summarizer, w.wins, 100.0 * w.rate,
                       w.mean_total);
  }
  out += "Fine-tune target: " + choice.model + "\n";
  return out;
}

}  // namespace tods
