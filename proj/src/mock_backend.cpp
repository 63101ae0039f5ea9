// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tods/error.hpp"
#include "tods/mock.hpp"
#include "tods/parsers.hpp"

namespace tods {
namespace {

std::string normalize_answer(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const std::string& binding(const ChatRequest& request, const std::string& name) {
  auto it = request.bindings.find(name);
  if (it == request.bindings.end()) {
    throw Error(ErrorKind::kMockGap, "request lacks binding [" + name + "] for planted mock");
  }
  return it->second;
}

std::optional<std::string> question_key(std::string_view question) {
  constexpr std::string_view kPrefix = "What is the ";
  const auto pos = question.find(kPrefix);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = question.substr(pos + kPrefix.size());
  const auto q = rest.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  return std::string(rest.substr(0, q));
}

std::string planted_summary(const MockBehavior& b, const ModelEntry& model,
                            const ChatRequest& request, std::uint64_t seed) {
  const auto facts = extract_planted_facts(binding(request, "Conversation"));
  const auto keep = static_cast<std::size_t>(
      std::llround(std::clamp(b.coverage, 0.0, 1.0) * static_cast<double>(facts.size())));
  auto perm = seeded_permutation(
      facts.size(), ShuffleKey{request.dialogue_id, 0, model.id.name, "mock-summary", 0, 0}, seed);
  perm.resize(keep);
  std::sort(perm.begin(), perm.end());
  if (perm.empty()) return "No key details were discussed.";
  std::string out;
  for (auto i : perm) {
    if (!out.empty()) out.push_back(' ');
    out += "The " + facts[i].key + " is " + facts[i].value + ".";
  }
  return out;
}

std::string planted_qa(const MockBehavior& b, const ChatRequest& request) {
  const auto facts = extract_planted_facts(binding(request, "Conversation"));
  const std::size_t limit = b.qa_limit == 0 ? facts.size() : std::min(b.qa_limit, facts.size());
  std::string out;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto k = std::to_string(i + 1);
    out += "Q" + k + ": What is the " + facts[i].key + "? A" + k + ": " + facts[i].value + ".\n";
  }
  return out.empty() ? "I could not find any facts." : out;
}

std::string planted_answer(const MockBehavior& b, const ModelEntry& model,
                           const ChatRequest& request, std::uint64_t seed) {
  const auto& summary = binding(request, "Summary");
  const auto key = question_key(binding(request, "Question"));
  if (!key) return std::string(kNotIncluded);
  for (const auto& f : extract_planted_facts(summary)) {
    if (f.key != *key) continue;
    DeterministicRng rng(stable_seed(
        seed, ShuffleKey{request.dialogue_id, 0, model.id.name,
                         "mock-answer|" + summary + "|" + binding(request, "Question"), 0, 0}));
    return rng.uniform() < b.answer_accuracy ? f.value : std::string("unknown");
  }
  return std::string(kNotIncluded);
}

std::string planted_rank(const MockBehavior& b, const ModelEntry& model,
                         const ChatRequest& request, std::uint64_t seed) {
  const auto gold = normalize_answer(binding(request, "Ground Truth Answer"));
  std::vector<std::string> answers;
  for (std::size_t k = 1;; ++k) {
    auto it = request.bindings.find("Answer_" + std::to_string(k));
    if (it == request.bindings.end()) break;
    answers.push_back(it->second);
  }
  auto grade = [&](const std::string& a) {
    if (a.find(kNotIncluded) != std::string::npos) return 0;
    return normalize_answer(a) == gold ? 2 : 1;
  };
  std::vector<std::size_t> order(answers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return grade(answers[x]) > grade(answers[y]);
  });
  DeterministicRng rng(stable_seed(
      seed, ShuffleKey{request.dialogue_id, request.question.value_or(0), model.id.name,
                       "mock-rank|" + request.stage, request.sample.value_or(0), request.attempt}));
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    if (rng.uniform() < b.evaluator_noise) std::swap(order[i], order[i + 1]);
  }

  std::vector<std::string> entries(answers.size());
  std::size_t next_rank = 1;
  for (auto position : order) {
    entries[position] = grade(answers[position]) == 0 ? std::string(kNotIncluded)
                                                      : std::to_string(next_rank++);
  }
  std::string out = "Ranking: [";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ", ";
    out += entries[i];
  }
  return out + "]";
}

}  // namespace

std::vector<PlantedFact> extract_planted_facts(std::string_view text) {
  std::vector<PlantedFact> facts;
  constexpr std::string_view kThe = "The ";
  constexpr std::string_view kIs = " is ";
  std::size_t pos = 0;
  while ((pos = text.find(kThe, pos)) != std::string_view::npos) {
    const std::size_t key_start = pos + kThe.size();
    pos = key_start;
    if (key_start - kThe.size() > 0 &&
        std::isalnum(static_cast<unsigned char>(text[key_start - kThe.size() - 1]))) {
      continue;
    }
    const auto is = text.find(kIs, key_start);
    const auto dot = text.find('.', key_start);
    if (is == std::string_view::npos || dot == std::string_view::npos || dot < is) continue;
    const auto key = text.substr(key_start, is - key_start);
    const auto value = text.substr(is + kIs.size(), dot - is - kIs.size());
    const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
      return std::islower(static_cast<unsigned char>(c)) || c == ' ';
    });
    const bool value_ok = !value.empty() && std::all_of(value.begin(), value.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
    });
    if (key_ok && value_ok) facts.push_back(PlantedFact{std::string(key), std::string(value)});
  }
  return facts;
}

MockBehavior MockBehavior::fixed(std::string text) {
  MockBehavior b;
  b.kind = Kind::kFixed;
  b.texts = {std::move(text)};
  return b;
}

MockBehavior MockBehavior::sequence(std::vector<std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::kConfig, "mock sequence needs at least one text");
  MockBehavior b;
  b.kind = Kind::kSequence;
  b.texts = std::move(texts);
  return b;
}

MockBehavior MockBehavior::planted(double coverage, double answer_accuracy,
                                   double evaluator_noise) {
  MockBehavior b;
  b.kind = Kind::kPlanted;
  b.coverage = coverage;
  b.answer_accuracy = answer_accuracy;
  b.evaluator_noise = evaluator_noise;
  return b;
}

nlohmann::json MockBehavior::to_json() const {
  switch (kind) {
    case Kind::kFixed: return {{"kind", "fixed"}, {"text", texts.at(0)}};
    case Kind::kSequence: return {{"kind", "sequence"}, {"texts", texts}};
    case Kind::kPlanted:
      return {{"kind", "planted"},          {"coverage", coverage},
              {"answer_accuracy", answer_accuracy}, {"evaluator_noise", evaluator_noise},
              {"qa_limit", qa_limit},       {"judge_score", judge_score}};
  }
  return {};
}

MockBehavior MockBehavior::from_json(const nlohmann::json& j) {
  static const std::vector<std::string> kPlantedKeys = {
      "kind", "coverage", "answer_accuracy", "evaluator_noise", "qa_limit", "judge_score"};
  const auto kind = j.value("kind", std::string("planted"));
  if (kind == "fixed") return fixed(j.at("text").get<std::string>());
  if (kind == "sequence") return sequence(j.at("texts").get<std::vector<std::string>>());
  if (kind != "planted") throw Error(ErrorKind::kConfig, "unknown mock behavior '" + kind + "'");
  for (const auto& [k, _] : j.items()) {
    if (std::find(kPlantedKeys.begin(), kPlantedKeys.end(), k) == kPlantedKeys.end()) {
      throw Error(ErrorKind::kConfig, "unknown key 'mock.behavior." + k + "'");
    }
  }
  MockBehavior b = planted(j.value("coverage", 1.0), j.value("answer_accuracy", 1.0),
                           j.value("evaluator_noise", 0.0));
  b.qa_limit = j.value("qa_limit", std::size_t{0});
  b.judge_score = j.value("judge_score", 5);
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(b.coverage) || !in_unit(b.answer_accuracy) || !in_unit(b.evaluator_noise)) {
    throw Error(ErrorKind::kConfig, "mock coverage/accuracy/noise must lie in [0, 1]");
  }
  if (b.judge_score < 1 || b.judge_score > 5) {
    throw Error(ErrorKind::kConfig, "mock judge_score must lie in 1..5");
  }
  return b;
}

void MockScript::set(std::string role, std::string dialogue, std::string model,
                     MockBehavior behavior) {
  if (role != kWildcard) role_from_string(role);
  rules_[{std::move(role), std::move(dialogue), std::move(model)}] = std::move(behavior);
}

const MockBehavior& MockScript::resolve(Role role, const std::string& dialogue,
                                        const std::string& model) const {
  const std::string r(to_string(role));
  const std::string any(kWildcard);
  const std::tuple<std::string, std::string, std::string> probes[] = {
      {r, dialogue, model}, {r, any, model}, {r, dialogue, any}, {r, any, any},
      {any, dialogue, model}, {any, any, model}, {any, dialogue, any}, {any, any, any},
  };
  for (const auto& p : probes) {
    auto it = rules_.find(p);
    if (it != rules_.end()) return it->second;
  }
  if (default_) return *default_;
  throw Error(ErrorKind::kMockGap, "no mock behavior for (" + r + ", " + dialogue + ", " + model +
                                       ") and no default");
}

nlohmann::json MockScript::to_json() const {
  auto rules = nlohmann::json::array();
  for (const auto& [key, b] : rules_) {
    rules.push_back({{"role", std::get<0>(key)},
                     {"dialogue", std::get<1>(key)},
                     {"model", std::get<2>(key)},
                     {"behavior", b.to_json()}});
  }
  nlohmann::json j = {{"seed", seed_}, {"rules", rules}};
  if (default_) j["default"] = default_->to_json();
  return j;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript s;
  for (const auto& [k, _] : j.items()) {
    if (k != "seed" && k != "rules" && k != "default") {
      throw Error(ErrorKind::kConfig, "unknown key 'mock." + k + "'");
    }
  }
  s.seed_ = j.value("seed", std::uint64_t{0});
  if (j.contains("rules")) {
    for (const auto& rule : j["rules"]) {
      s.set(rule.value("role", std::string(kWildcard)), rule.value("dialogue", std::string(kWildcard)),
            rule.value("model", std::string(kWildcard)), MockBehavior::from_json(rule.at("behavior")));
    }
  }
  if (j.contains("default")) s.default_ = MockBehavior::from_json(j["default"]);
  return s;
}

std::string MockBackend::reply(const ModelEntry& model, const ChatRequest& request) const {
  const auto& b = script_.resolve(request.role, request.dialogue_id, model.id.name);
  switch (b.kind) {
    case MockBehavior::Kind::kFixed: return b.texts.at(0);
    case MockBehavior::Kind::kSequence: {
      const auto i = std::min<std::size_t>(static_cast<std::size_t>(request.attempt),
                                           b.texts.size() - 1);
      return b.texts[i];
    }
    case MockBehavior::Kind::kPlanted: break;
  }
  switch (request.role) {
    case Role::kSummary: return planted_summary(b, model, request, script_.seed());
    case Role::kQaGeneration: return planted_qa(b, request);
    case Role::kAnswer: return planted_answer(b, model, request, script_.seed());
    case Role::kRank: return planted_rank(b, model, request, script_.seed());
    default: return "**Score:** " + std::to_string(b.judge_score);
  }
}

ChatResponse MockBackend::send(const ModelEntry& model, const ChatRequest& request) {
  ChatResponse r;
  r.text = reply(model, request);
  r.finish_reason = "stop";
  return r;
}

}  // namespace tods
