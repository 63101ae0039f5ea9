// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/finetune.hpp"

#include <map>

#include "tods/error.hpp"

namespace tods {

nlohmann::json FinetuneChoice::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& w : table) {
    rows.push_back({{"summarizer", w.summarizer},
                    {"wins", w.wins},
                    {"win_rate", w.rate},
                    {"mean_stage2_total", w.mean_total}});
  }
  return {{"model", model}, {"win_rates", rows}};
}

FinetuneChoice select_finetune_model(const std::vector<SelectionRecord>& records,
                                     const ModelRegistry& pool) {
  if (records.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no selection records to choose a model from");
  }
  FinetuneChoice choice;
  const double n = static_cast<double>(records.size());
  for (const auto& m : pool.models()) {
    WinRate w;
    w.summarizer = m.id.name;
    double total = 0.0;
    for (const auto& r : records) {
      if (r.best_summarizer == m.id.name) ++w.wins;
      auto it = r.table.totals.find(m.id.name);
      if (it != r.table.totals.end()) total += it->second;
    }
    w.rate = static_cast<double>(w.wins) / n;
    w.mean_total = total / n;
    choice.table.push_back(w);
  }
  const WinRate* best = &choice.table.front();
  for (const auto& w : choice.table) {
    if (w.wins > best->wins || (w.wins == best->wins && w.mean_total > best->mean_total)) {
      best = &w;
    }
  }
  choice.model = best->summarizer;
  return choice;
}

nlohmann::json lora_hyperparameters() {
  return {{"method", "lora"},
          {"epochs", 3},
          {"rank", 8},
          {"alpha", 16},
          {"learning_rate", 5e-5},
          {"optimizer", "adamw"},
          {"adam_beta1", 0.9},
          {"adam_beta2", 0.999},
          {"adam_epsilon", 1e-8},
          {"lr_scheduler", "linear"}};
}

std::vector<FinetuneRecord> build_finetune_records(const std::vector<SelectionRecord>& records,
                                                   const std::vector<Dialogue>& corpus) {
  std::map<std::string, const SelectionRecord*> by_id;
  for (const auto& r : records) by_id[r.dialogue_id] = &r;
  std::vector<FinetuneRecord> out;
  std::string missing;
  for (const auto& d : corpus) {
    auto it = by_id.find(d.id);
    if (it == by_id.end()) {
      missing += (missing.empty() ? "" : ", ") + d.id;
      continue;
    }
    const auto& r = *it->second;
    out.push_back(FinetuneRecord{d.task_prompt, d.serialized(), r.summary,
                                 {{"dialogue_id", d.id},
                                  {"summarizer", r.best_summarizer},
                                  {"scores", r.table.totals},
                                  {"tie_broken", r.tie_broken}}});
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::kPrecondition, "no selected summary for dialogues: " + missing);
  }
  return out;
}

nlohmann::json finetune_metadata(const FinetuneChoice& choice, std::size_t record_count,
                                 const std::string& run_id) {
  return {{"run_id", run_id},
          {"record_count", record_count},
          {"target_model", choice.model},
          {"selection", choice.to_json()},
          {"hyperparameters", lora_hyperparameters()}};
}

}  // namespace tods
