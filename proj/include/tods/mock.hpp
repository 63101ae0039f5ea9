// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file mock.hpp
 * @brief Deterministic offline backend used as the pipeline's test oracle.
 *
 * Planted-fact corpora state facts as sentences "The <key> is <value>.".
 * Planted behaviours then act as an idealised pool:
 *   - summary: keeps round(coverage * F) facts, chosen by a seeded draw;
 *   - qa_generation: "Qk: What is the <key>? Ak: <value>." per fact;
 *   - answer: the value when the summary states the fact (correct with
 *     probability answer_accuracy, else a wrong value), otherwise NOT_INCLUDED;
 *   - rank: sorts presented answers by correctness (correct > wrong >
 *     NOT_INCLUDED), then swaps each adjacent pair with probability
 *     evaluator_noise;
 *   - judge-*: replies "**Score:** <judge_score>".
 * Every random draw is keyed by the request cell, so replies are pure
 * functions of the request.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tods/gateway.hpp"

namespace tods {

struct PlantedFact {
  std::string key;
  std::string value;
};

/// Facts stated as "The <key> is <value>." in `text`, in order of appearance.
std::vector<PlantedFact> extract_planted_facts(std::string_view text);

struct MockBehavior {
  enum class Kind { kFixed, kSequence, kPlanted };

  Kind kind = Kind::kPlanted;
  std::vector<std::string> texts;  // kFixed: one text; kSequence: indexed by request attempt
  double coverage = 1.0;
  double answer_accuracy = 1.0;
  double evaluator_noise = 0.0;
  std::size_t qa_limit = 0;  // 0 = one pair per fact
  int judge_score = 5;

  static MockBehavior fixed(std::string text);
  static MockBehavior sequence(std::vector<std::string> texts);
  static MockBehavior planted(double coverage = 1.0, double answer_accuracy = 1.0,
                              double evaluator_noise = 0.0);

  nlohmann::json to_json() const;
  static MockBehavior from_json(const nlohmann::json& j);
};

inline constexpr std::string_view kWildcard = "*";

/// Behaviours keyed by (role, dialogue id, model); "*" matches anything.
/// Lookup prefers the most specific rule: exact fields first, dialogue
/// wildcard before model wildcard, role wildcard last; then the default.
class MockScript {
 public:
  void set(std::string role, std::string dialogue, std::string model, MockBehavior behavior);
  void set_default(MockBehavior behavior) { default_ = std::move(behavior); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  std::uint64_t seed() const noexcept { return seed_; }
  bool empty() const noexcept { return rules_.empty() && !default_; }

  /// Throws kMockGap when neither a rule nor a default covers the request.
  const MockBehavior& resolve(Role role, const std::string& dialogue,
                              const std::string& model) const;

  nlohmann::json to_json() const;
  static MockScript from_json(const nlohmann::json& j);

 private:
  std::map<std::tuple<std::string, std::string, std::string>, MockBehavior> rules_;
  std::optional<MockBehavior> default_;
  std::uint64_t seed_ = 0;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script) : script_(std::move(script)) {}

  ChatResponse send(const ModelEntry& model, const ChatRequest& request) override;

  /// The reply text alone; pure function of (script, model, request).
  std::string reply(const ModelEntry& model, const ChatRequest& request) const;

 private:
  MockScript script_;
};

}  // namespace tods
