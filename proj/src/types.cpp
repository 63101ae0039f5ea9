// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/types.hpp"

namespace tods {
namespace {

nlohmann::json consensus_to_json(const std::vector<CellConsensus>& cells) {
  auto out = nlohmann::json::array();
  for (const auto& c : cells) {
    out.push_back({{"question_index", c.question_index},
                   {"evaluator", c.evaluator},
                   {"order", c.order},
                   {"valid_samples", c.valid_samples}});
  }
  return out;
}

std::vector<CellConsensus> consensus_from_json(const nlohmann::json& j) {
  std::vector<CellConsensus> out;
  for (const auto& c : j) {
    out.push_back(CellConsensus{c.at("question_index").get<std::size_t>(),
                                c.at("evaluator").get<std::string>(),
                                c.at("order").get<std::vector<std::string>>(),
                                c.at("valid_samples").get<std::size_t>()});
  }
  return out;
}

}  // namespace

std::string Dialogue::serialized() const {
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i) out.push_back('\n');
    out += turns[i].speaker;
    out += ": ";
    out += turns[i].text;
  }
  return out;
}

nlohmann::json Dialogue::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["task_prompt"] = task_prompt;
  auto ts = nlohmann::json::array();
  for (const auto& t : turns) ts.push_back({{"speaker", t.speaker}, {"text", t.text}});
  j["turns"] = std::move(ts);
  if (header) j["header"] = *header;
  if (reference) j["reference"] = *reference;
  return j;
}

Dialogue Dialogue::from_json(const nlohmann::json& j) {
  Dialogue d;
  d.id = j.at("id").get<std::string>();
  d.task_prompt = j.at("task_prompt").get<std::string>();
  for (const auto& t : j.at("turns")) {
    d.turns.push_back(Turn{t.at("speaker").get<std::string>(), t.at("text").get<std::string>()});
  }
  if (j.contains("header") && !j["header"].is_null()) d.header = j["header"].get<std::string>();
  if (j.contains("reference") && !j["reference"].is_null()) {
    d.reference = j["reference"].get<std::string>();
  }
  return d;
}

nlohmann::json SummaryCandidate::to_json() const {
  return {{"dialogue_id", dialogue_id}, {"summarizer", summarizer}, {"text", text}};
}

SummaryCandidate SummaryCandidate::from_json(const nlohmann::json& j) {
  return SummaryCandidate{j.at("dialogue_id").get<std::string>(),
                          j.at("summarizer").get<std::string>(), j.at("text").get<std::string>()};
}

nlohmann::json QaPair::to_json() const {
  return {{"dialogue_id", dialogue_id}, {"question_index", question_index},
          {"question", question},       {"answer", answer},
          {"generator", generator}};
}

QaPair QaPair::from_json(const nlohmann::json& j) {
  return QaPair{j.at("dialogue_id").get<std::string>(), j.at("question_index").get<std::size_t>(),
                j.at("question").get<std::string>(), j.at("answer").get<std::string>(),
                j.at("generator").get<std::string>()};
}

nlohmann::json CandidateAnswer::to_json() const {
  return {{"dialogue_id", dialogue_id}, {"question_index", question_index},
          {"summarizer", summarizer},   {"responder", responder},
          {"text", text},               {"not_included", not_included}};
}

CandidateAnswer CandidateAnswer::from_json(const nlohmann::json& j) {
  return CandidateAnswer{j.at("dialogue_id").get<std::string>(),
                         j.at("question_index").get<std::size_t>(),
                         j.at("summarizer").get<std::string>(),
                         j.at("responder").get<std::string>(),
                         j.at("text").get<std::string>(),
                         j.at("not_included").get<bool>()};
}

nlohmann::json NamedScoreTable::to_json() const {
  nlohmann::json e = nlohmann::json::object();
  for (const auto& [subject, row] : entries) {
    for (const auto& [evaluator, v] : row) {
      e[subject][evaluator] = {{"mrr", v.value}, {"questions", v.question_count}};
    }
  }
  return {{"entries", e}, {"totals", totals}, {"alpha_self", alpha_self}};
}

NamedScoreTable NamedScoreTable::from_json(const nlohmann::json& j) {
  NamedScoreTable t;
  for (const auto& [subject, row] : j.at("entries").items()) {
    for (const auto& [evaluator, v] : row.items()) {
      t.entries[subject][evaluator] =
          MrrValue{v.at("mrr").get<double>(), v.at("questions").get<std::size_t>()};
    }
  }
  t.totals = j.at("totals").get<std::map<std::string, double>>();
  t.alpha_self = j.at("alpha_self").get<double>();
  return t;
}

nlohmann::json Stage1Record::to_json() const {
  return {{"dialogue_id", dialogue_id}, {"summarizer", summarizer},
          {"best_responder", best_responder}, {"tied", tied},
          {"table", table.to_json()}, {"consensus", consensus_to_json(consensus)}};
}

Stage1Record Stage1Record::from_json(const nlohmann::json& j) {
  Stage1Record r;
  r.dialogue_id = j.at("dialogue_id").get<std::string>();
  r.summarizer = j.at("summarizer").get<std::string>();
  r.best_responder = j.at("best_responder").get<std::string>();
  r.tied = j.at("tied").get<std::size_t>();
  r.table = NamedScoreTable::from_json(j.at("table"));
  r.consensus = consensus_from_json(j.at("consensus"));
  return r;
}

nlohmann::json SelectionRecord::to_json() const {
  return {{"dialogue_id", dialogue_id},
          {"best_responders", best_responders},
          {"best_summarizer", best_summarizer},
          {"summary", summary},
          {"tie_broken", tie_broken},
          {"table", table.to_json()},
          {"consensus", consensus_to_json(consensus)}};
}

SelectionRecord SelectionRecord::from_json(const nlohmann::json& j) {
  SelectionRecord r;
  r.dialogue_id = j.at("dialogue_id").get<std::string>();
  r.best_responders = j.at("best_responders").get<std::map<std::string, std::string>>();
  r.best_summarizer = j.at("best_summarizer").get<std::string>();
  r.summary = j.at("summary").get<std::string>();
  r.tie_broken = j.at("tie_broken").get<bool>();
  r.table = NamedScoreTable::from_json(j.at("table"));
  r.consensus = consensus_from_json(j.at("consensus"));
  return r;
}

nlohmann::json FinetuneRecord::to_json() const {
  return {{"instruction", instruction}, {"input", input}, {"output", output}, {"meta", meta}};
}

FinetuneRecord FinetuneRecord::from_json(const nlohmann::json& j) {
  return FinetuneRecord{j.at("instruction").get<std::string>(), j.at("input").get<std::string>(),
                        j.at("output").get<std::string>(), j.at("meta")};
}

}  // namespace tods
