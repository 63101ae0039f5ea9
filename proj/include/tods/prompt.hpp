// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tods {

enum class Role {
  kSummary,
  kQaGeneration,
  kAnswer,
  kRank,
  kJudgeCoherence,
  kJudgeConsistency,
  kJudgeFluency,
  kJudgeRelevance,
};

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);
bool is_judge_role(Role role);
/// Ranking and judging decode at the ranking temperature, the rest at the generation one.
bool is_scoring_role(Role role);

using Bindings = std::map<std::string, std::string>;

/// Instruction and input parts of a prompt with `[Name]` placeholders.
struct PromptTemplate {
  Role role = Role::kSummary;
  std::string instruction;
  std::string input;

  /// Placeholder names (without brackets) in order of first appearance.
  std::vector<std::string> placeholders() const;
  std::string digest() const;

  nlohmann::json to_json() const;
  static PromptTemplate from_json(const nlohmann::json& j);
};

struct RenderedPrompt {
  std::string instruction;
  std::string input;

  /// Single user message: instruction, blank line, input.
  std::string text() const { return instruction + "\n\n" + input; }
};

/// Placeholder names recognised in `text`.
std::vector<std::string> scan_placeholders(std::string_view text);

/// Substitutes every placeholder in one pass, so bound values are never
/// re-scanned. Throws kTemplateBinding on a missing or unused binding.
RenderedPrompt render_prompt(const PromptTemplate& tpl, const Bindings& bindings);

/// Built-in template by data-file name, e.g. "summary_samsum", "rank".
PromptTemplate builtin_template(std::string_view name);
std::vector<std::string> builtin_template_names();

/// The three-answer ranking template rewritten for `pool_size` answers.
PromptTemplate rank_template_for(const PromptTemplate& base, std::size_t pool_size);

/// "[r1, r2, ...]" as requested by the ranking template.
std::string format_rank_list(const std::vector<std::size_t>& ranks);

}  // namespace tods
