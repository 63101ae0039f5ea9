// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/judge.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "tods/error.hpp"
#include "tods/parsers.hpp"

namespace tods {

nlohmann::json JudgeScore::to_json() const {
  return {{"dialogue_id", dialogue_id},
          {"system", system},
          {"judge", judge},
          {"dimension", std::string(to_string(dimension))},
          {"score", score ? nlohmann::json(*score) : nlohmann::json(nullptr)},
          {"attempts", attempts}};
}

JudgeScore JudgeScore::from_json(const nlohmann::json& j) {
  JudgeScore s;
  s.dialogue_id = j.at("dialogue_id").get<std::string>();
  s.system = j.at("system").get<std::string>();
  s.judge = j.at("judge").get<std::string>();
  s.dimension = role_from_string(j.at("dimension").get<std::string>());
  if (!j.at("score").is_null()) s.score = j["score"].get<int>();
  s.attempts = j.at("attempts").get<int>();
  return s;
}

nlohmann::json JudgeRow::to_json() const {
  nlohmann::json dims = nlohmann::json::object();
  for (const auto& [role, mean] : dimension_mean) dims[std::string(to_string(role))] = mean;
  return {{"system", system}, {"dimensions", dims}, {"average", average},
          {"scored", scored}, {"missing", missing}};
}

std::vector<JudgeScore> judge_summaries(Gateway& gateway, const ModelRegistry& judges,
                                        const std::vector<Dialogue>& dialogues,
                                        const std::vector<JudgedSummary>& summaries,
                                        const PipelineOptions& options) {
  std::map<std::string, const Dialogue*> by_id;
  for (const auto& d : dialogues) by_id[d.id] = &d;
  const auto& templates = options.templates.judge;

  std::vector<std::vector<JudgeScore>> per_summary(summaries.size());
  parallel_for_each_index(summaries.size(), options.parallelism, [&](std::size_t i) {
    const auto& s = summaries[i];
    auto it = by_id.find(s.dialogue_id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::kPrecondition, "no dialogue " + s.dialogue_id + " to judge against");
    }
    const Bindings available{{"Dialogue", it->second->serialized()}, {"Summary", s.text}};
    for (const auto& [dimension, tpl] : templates) {
      const auto stage = "judge/" + s.system + "/" + std::string(to_string(dimension));
      for (const auto& judge : judges.models()) {
        JudgeScore score{s.dialogue_id, s.system, judge.id.name, dimension, std::nullopt, 0};
        for (int attempt = 0; attempt <= options.max_parse_retries; ++attempt) {
          score.attempts = attempt + 1;
          const auto reply =
              complete_prompt(gateway, judge, {stage, s.dialogue_id, {}, {}, attempt}, tpl, available);
          try {
            score.score = parse_judge_score(reply.text);
            break;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kParseFailure) throw;
          }
        }
        if (!score.score) {
          spdlog::warn("judge {} gave no parseable {} score for {} / {}", judge.id.name,
                       to_string(dimension), s.dialogue_id, s.system);
        }
        per_summary[i].push_back(std::move(score));
      }
    }
  });
  std::vector<JudgeScore> out;
  for (auto& v : per_summary) {
    for (auto& s : v) out.push_back(std::move(s));
  }
  return out;
}

std::vector<JudgeRow> summarize_judge_scores(const std::vector<JudgeScore>& scores) {
  std::vector<std::string> systems;
  std::set<std::string> seen;
  for (const auto& s : scores) {
    if (seen.insert(s.system).second) systems.push_back(s.system);
  }
  std::vector<JudgeRow> rows;
  for (const auto& system : systems) {
    JudgeRow row;
    row.system = system;
    std::map<Role, std::pair<double, std::size_t>> acc;
    for (const auto& s : scores) {
      if (s.system != system) continue;
      if (!s.score) {
        ++row.missing;
        continue;
      }
      ++row.scored;
      acc[s.dimension].first += *s.score;
      ++acc[s.dimension].second;
    }
    double sum = 0.0;
    for (const auto& [role, a] : acc) {
      row.dimension_mean[role] = a.first / static_cast<double>(a.second);
      sum += row.dimension_mean[role];
    }
    row.average = acc.empty() ? 0.0 : sum / static_cast<double>(acc.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tods
