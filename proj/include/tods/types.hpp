// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/ranking.hpp"

namespace tods {

struct Turn {
  std::string speaker;
  std::string text;
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;
  std::string task_prompt;
  std::optional<std::string> header;
  /// Human-written summary, when the dataset ships one.
  std::optional<std::string> reference;

  /// "speaker: text" per line; the form shown to models and exported for fine-tuning.
  std::string serialized() const;

  nlohmann::json to_json() const;
  static Dialogue from_json(const nlohmann::json& j);
};

struct SummaryCandidate {
  std::string dialogue_id;
  std::string summarizer;
  std::string text;

  nlohmann::json to_json() const;
  static SummaryCandidate from_json(const nlohmann::json& j);
};

struct QaPair {
  std::string dialogue_id;
  std::size_t question_index = 0;  // 1-based, dense per dialogue
  std::string question;
  std::string answer;
  std::string generator;

  nlohmann::json to_json() const;
  static QaPair from_json(const nlohmann::json& j);
};

struct CandidateAnswer {
  std::string dialogue_id;
  std::size_t question_index = 0;
  std::string summarizer;
  std::string responder;
  std::string text;
  bool not_included = false;

  nlohmann::json to_json() const;
  static CandidateAnswer from_json(const nlohmann::json& j);
};

/// Consensus ranking of one (question, evaluator) cell, with the number of
/// valid samples it was aggregated from.
struct CellConsensus {
  std::size_t question_index = 0;
  std::string evaluator;
  std::vector<std::string> order;  // subject names, best first
  std::size_t valid_samples = 0;
};

/// Score table keyed by model names, as persisted in stage artifacts.
struct NamedScoreTable {
  std::map<std::string, std::map<std::string, MrrValue>> entries;  // subject -> evaluator -> MRR
  std::map<std::string, double> totals;
  double alpha_self = 0.8;

  nlohmann::json to_json() const;
  static NamedScoreTable from_json(const nlohmann::json& j);
};

struct Stage1Record {
  std::string dialogue_id;
  std::string summarizer;
  std::string best_responder;
  std::size_t tied = 1;
  NamedScoreTable table;
  std::vector<CellConsensus> consensus;

  nlohmann::json to_json() const;
  static Stage1Record from_json(const nlohmann::json& j);
};

struct SelectionRecord {
  std::string dialogue_id;
  std::map<std::string, std::string> best_responders;  // summarizer -> responder
  std::string best_summarizer;
  std::string summary;
  bool tie_broken = false;
  NamedScoreTable table;
  std::vector<CellConsensus> consensus;

  nlohmann::json to_json() const;
  static SelectionRecord from_json(const nlohmann::json& j);
};

struct FinetuneRecord {
  std::string instruction;
  std::string input;
  std::string output;
  nlohmann::json meta;

  nlohmann::json to_json() const;
  static FinetuneRecord from_json(const nlohmann::json& j);
};

template <typename T>
std::vector<nlohmann::json> to_records(const std::vector<T>& items) {
  std::vector<nlohmann::json> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.to_json());
  return out;
}

template <typename T>
std::vector<T> from_records(const std::vector<nlohmann::json>& records) {
  std::vector<T> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(T::from_json(r));
  return out;
}

}  // namespace tods
