// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

#include "tods/digest.hpp"
#include "tods/error.hpp"

namespace tods {
namespace detail {
const std::map<std::string, std::string>& embedded_templates();
}  // namespace detail

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 8> kRoleNames{{
    {Role::kSummary, "summary"},
    {Role::kQaGeneration, "qa_generation"},
    {Role::kAnswer, "answer"},
    {Role::kRank, "rank"},
    {Role::kJudgeCoherence, "judge-coherence"},
    {Role::kJudgeConsistency, "judge-consistency"},
    {Role::kJudgeFluency, "judge-fluency"},
    {Role::kJudgeRelevance, "judge-relevance"},
}};

bool is_placeholder_name(std::string_view name) {
  static const std::set<std::string, std::less<>> kFixed = {
      "Conversation", "Header", "Question", "Ground Truth Answer", "Dialogue", "Summary"};
  if (kFixed.contains(name)) return true;
  constexpr std::string_view kAnswer = "Answer_";
  if (name.size() > kAnswer.size() && name.substr(0, kAnswer.size()) == kAnswer) {
    for (char c : name.substr(kAnswer.size())) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }
  return false;
}

// Calls on_text for literal runs and on_placeholder for each recognised marker.
template <typename OnText, typename OnPlaceholder>
void walk(std::string_view text, OnText on_text, OnPlaceholder on_placeholder) {
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      const auto close = text.find(']', i + 1);
      if (close != std::string_view::npos) {
        const auto name = text.substr(i + 1, close - i - 1);
        if (is_placeholder_name(name)) {
          on_text(text.substr(literal_start, i - literal_start));
          on_placeholder(name);
          i = close + 1;
          literal_start = i;
          continue;
        }
      }
    }
    ++i;
  }
  on_text(text.substr(literal_start));
}

std::string render_part(std::string_view text, const Bindings& bindings,
                        std::set<std::string>& used) {
  std::string out;
  walk(
      text, [&](std::string_view lit) { out.append(lit); },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) {
          throw Error(ErrorKind::kTemplateBinding, "no binding for [" + std::string(name) + "]");
        }
        used.insert(it->first);
        out += it->second;
      });
  return out;
}

std::string number_word(std::size_t n) {
  static constexpr std::array<std::string_view, 9> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight"};
  return n < kWords.size() ? std::string(kWords[n]) : std::to_string(n);
}

void replace_once(std::string& s, std::string_view from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
}

bool is_answer_line(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  return i > 0 && line.compare(i, 3, ") [") == 0 && line.find("[Answer_") != std::string::npos;
}

}  // namespace

std::string_view to_string(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

Role role_from_string(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown role '" + std::string(name) + "'");
}

bool is_judge_role(Role role) {
  return role == Role::kJudgeCoherence || role == Role::kJudgeConsistency ||
         role == Role::kJudgeFluency || role == Role::kJudgeRelevance;
}

bool is_scoring_role(Role role) { return role == Role::kRank || is_judge_role(role); }

std::vector<std::string> scan_placeholders(std::string_view text) {
  std::vector<std::string> names;
  walk(
      text, [](std::string_view) {},
      [&](std::string_view name) {
        std::string n(name);
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(std::move(n));
      });
  return names;
}

std::vector<std::string> PromptTemplate::placeholders() const {
  auto names = scan_placeholders(instruction);
  for (auto& n : scan_placeholders(input)) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(std::move(n));
  }
  return names;
}

std::string PromptTemplate::digest() const {
  return sha256_hex(std::string(to_string(role)) + '\0' + instruction + '\0' + input);
}

nlohmann::json PromptTemplate::to_json() const {
  return {{"role", std::string(to_string(role))}, {"instruction", instruction}, {"input", input}};
}

PromptTemplate PromptTemplate::from_json(const nlohmann::json& j) {
  PromptTemplate t;
  try {
    t.role = role_from_string(j.at("role").get<std::string>());
    t.instruction = j.at("instruction").get<std::string>();
    t.input = j.at("input").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kTemplateBinding, std::string("malformed template: ") + e.what());
  }
  return t;
}

RenderedPrompt render_prompt(const PromptTemplate& tpl, const Bindings& bindings) {
  std::set<std::string> used;
  RenderedPrompt out;
  out.instruction = render_part(tpl.instruction, bindings, used);
  out.input = render_part(tpl.input, bindings, used);
  for (const auto& [name, _] : bindings) {
    if (!used.contains(name)) {
      throw Error(ErrorKind::kTemplateBinding,
                  "binding [" + name + "] is not a placeholder of the " +
                      std::string(to_string(tpl.role)) + " template");
    }
  }
  return out;
}

PromptTemplate builtin_template(std::string_view name) {
  const auto& all = detail::embedded_templates();
  auto it = all.find(std::string(name));
  if (it == all.end()) {
    throw Error(ErrorKind::kNotFound, "no built-in template '" + std::string(name) + "'");
  }
  return PromptTemplate::from_json(nlohmann::json::parse(it->second));
}

std::vector<std::string> builtin_template_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : detail::embedded_templates()) names.push_back(name);
  return names;
}

PromptTemplate rank_template_for(const PromptTemplate& base, std::size_t pool_size) {
  if (pool_size < 2) {
    throw Error(ErrorKind::kInvalidArgument, "ranking needs at least two answers");
  }
  if (pool_size == 3) return base;
  PromptTemplate t = base;
  const auto n = std::to_string(pool_size);
  replace_once(t.instruction, "three-element", number_word(pool_size) + "-element");
  replace_once(t.instruction, "between 1 and 3", "between 1 and " + n);
  replace_once(t.instruction, "and 3 represents", "and " + n + " represents");

  std::istringstream lines(base.input);
  std::string line;
  std::vector<std::string> kept;
  bool inserted = false;
  while (std::getline(lines, line)) {
    if (is_answer_line(line)) {
      if (!inserted) {
        for (std::size_t k = 1; k <= pool_size; ++k) {
          kept.push_back(std::to_string(k) + ") [Answer_" + std::to_string(k) + "]");
        }
        inserted = true;
      }
      continue;
    }
    kept.push_back(line);
  }
  t.input.clear();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) t.input.push_back('\n');
    t.input += kept[i];
  }
  return t;
}

std::string format_rank_list(const std::vector<std::size_t>& ranks) {
  std::string out = "[";
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ranks[i]);
  }
  return out + "]";
}

}  // namespace tods
