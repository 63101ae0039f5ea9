// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/synthetic.hpp"

#include <array>
#include <set>

#include "tods/datastore.hpp"
#include "tods/error.hpp"
#include "tods/mock.hpp"
#include "tods/ranking.hpp"

namespace tods {
namespace {

constexpr std::array<const char*, 16> kAdjectives = {
    "meeting", "delivery", "backup", "project", "travel", "dinner", "office", "parking",
    "gym",     "invoice",  "school", "garden",  "server", "party",  "flight", "rental"};
constexpr std::array<const char*, 8> kNouns = {"room", "code", "day",  "budget",
                                               "time", "host", "zone", "colour"};
constexpr std::array<const char*, 12> kValues = {"amber", "birch", "cobalt", "delta",
                                                 "ember", "fjord", "garnet", "harbor",
                                                 "indigo", "juniper", "kestrel", "lagoon"};
constexpr std::array<const char*, 4> kSpeakers = {"Alice", "Bob", "Chen", "Dana"};
constexpr std::array<const char*, 4> kFillers = {"Quick update.", "Noting this down.",
                                                 "Good to know.", "Just confirming."};

}  // namespace

std::vector<Dialogue> synthetic_corpus(const SyntheticOptions& shape) {
  if (shape.facts == 0 || shape.facts > kAdjectives.size() * kNouns.size()) {
    throw Error(ErrorKind::kInvalidArgument, "facts per dialogue must lie in 1..128");
  }
  std::vector<Dialogue> out;
  for (std::size_t i = 0; i < shape.dialogues; ++i) {
    Dialogue d;
    d.id = "syn-" + std::to_string(i);
    DeterministicRng rng(stable_seed(shape.seed, ShuffleKey{d.id, 0, "", "synthetic", 0, 0}));
    std::set<std::string> keys;
    std::string reference;
    const auto speaker_a = kSpeakers[rng.below(2)];
    const auto speaker_b = kSpeakers[2 + rng.below(2)];
    while (keys.size() < shape.facts) {
      std::string key = std::string(kAdjectives[rng.below(kAdjectives.size())]) + " " +
                        kNouns[rng.below(kNouns.size())];
      if (!keys.insert(key).second) continue;
      const std::string value =
          std::string(kValues[rng.below(kValues.size())]) + "-" + std::to_string(100 + rng.below(900));
      const std::string fact = "The " + key + " is " + value + ".";
      d.turns.push_back(Turn{keys.size() % 2 ? speaker_a : speaker_b,
                             std::string(kFillers[rng.below(kFillers.size())]) + " " + fact});
      reference += (reference.empty() ? "" : " ") + fact;
    }
    d.turns.push_back(Turn{speaker_a, "Thanks, talk soon."});
    d.task_prompt =
        "Summarize the conversation so that every stated detail can be looked up later.";
    if (shape.with_references) d.reference = reference;
    out.push_back(std::move(d));
  }
  return out;
}

nlohmann::json synthetic_config(const SyntheticPool& pool, const std::string& corpus_path,
                                const std::string& store_root) {
  if (pool.names.size() != pool.coverages.size() || pool.names.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "one coverage per model is required");
  }
  MockScript script;
  script.set_seed(pool.mock_seed);
  script.set_default(MockBehavior::planted(1.0, pool.answer_accuracy, pool.evaluator_noise));
  auto models = nlohmann::json::array();
  for (std::size_t i = 0; i < pool.names.size(); ++i) {
    models.push_back({{"name", pool.names[i]}, {"backend", "mock"}});
    script.set("summary", std::string(kWildcard), pool.names[i],
               MockBehavior::planted(pool.coverages[i], pool.answer_accuracy, pool.evaluator_noise));
  }
  return {{"registry", {{"models", models}, {"mock", script.to_json()}}},
          {"dataset", {{"path", corpus_path}, {"format", "native"}, {"profile", "samsum"}}},
          {"store", {{"root", store_root}}}};
}

void write_corpus(const std::string& path, const std::vector<Dialogue>& dialogues) {
  std::string text;
  for (const auto& d : dialogues) text += encode_record(d.to_json()) + "\n";
  atomic_write(path, text);
}

}  // namespace tods
