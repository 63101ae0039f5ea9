// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file pipeline.hpp
 * @brief Generation, answering and the two ranking-based selection stages.
 *
 * Dialogues are processed with bounded parallelism; within a dialogue calls
 * run in a fixed order so artifacts are a pure function of the inputs.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tods/gateway.hpp"
#include "tods/prompt.hpp"
#include "tods/types.hpp"

namespace tods {

/// Prompt templates for one dataset profile.
struct TemplateSet {
  /// Only the input part is used; the instruction is the dialogue's task prompt.
  PromptTemplate summary;
  PromptTemplate qa;
  PromptTemplate answer;
  /// Three-answer form, rewritten for other pool sizes.
  PromptTemplate rank;
  std::map<Role, PromptTemplate> judge;
  /// Prefix the QA instruction with the dialogue's task prompt.
  bool qa_include_task_prompt = true;

  /// Profiles: samsum, dialogsum, mts, simsamu.
  static TemplateSet for_profile(std::string_view profile);
  /// Default task prompt of a profile (its summary instruction).
  static std::string default_task_prompt(std::string_view profile);
};

struct PipelineOptions {
  std::size_t samples = 5;  // N ranking repeats per cell
  double alpha_self = 0.8;
  std::uint64_t global_seed = 0;
  std::size_t parallelism = 1;
  int max_parse_retries = 3;
  TemplateSet templates = TemplateSet::for_profile("samsum");
};

/// Consensus of one ranking cell.
struct CellResult {
  Ranking consensus;
  std::size_t valid_samples = 0;
};

class Pipeline {
 public:
  /// `pool` must be a subset (by name) of the gateway's registry.
  Pipeline(Gateway& gateway, ModelRegistry pool, PipelineOptions options);

  const ModelRegistry& pool() const noexcept { return pool_; }
  const PipelineOptions& options() const noexcept { return options_; }

  /// One summary per (dialogue, summarizer), dialogue-major.
  std::vector<SummaryCandidate> generate_summaries(const std::vector<Dialogue>& dialogues);

  /// Merged, de-duplicated gold pairs with dense 1-based indices per dialogue.
  std::vector<QaPair> generate_qa(const std::vector<Dialogue>& dialogues);

  /// One answer per (dialogue, question, summarizer, responder), read from the summary only.
  std::vector<CandidateAnswer> answer_questions(const std::vector<SummaryCandidate>& summaries,
                                                const std::vector<QaPair>& qa);

  /// Best responder per (dialogue, summarizer).
  std::vector<Stage1Record> stage1(const std::vector<CandidateAnswer>& answers,
                                   const std::vector<QaPair>& qa);

  /// Best summary per dialogue.
  std::vector<SelectionRecord> stage2(const std::vector<Stage1Record>& stage1,
                                      const std::vector<CandidateAnswer>& answers,
                                      const std::vector<QaPair>& qa,
                                      const std::vector<SummaryCandidate>& summaries);

  /// N shuffled ranking prompts for one (question, evaluator) cell, then
  /// Kemeny aggregation. `answers[k]` belongs to pool model k. Throws kStage
  /// when fewer than ceil(N/2) samples parse.
  CellResult rank_cell(const std::string& stage, const QaPair& question,
                       const ModelEntry& evaluator, const std::vector<std::string>& answers);

 private:
  Gateway& gateway_;
  ModelRegistry pool_;
  PipelineOptions options_;
  PromptTemplate rank_template_;  // sized for the pool
};

/// Cell identity of one prompt; becomes part of the cache key.
struct PromptCall {
  std::string stage;
  std::string dialogue_id;
  std::optional<std::int64_t> question;
  std::optional<std::int64_t> sample;
  std::int64_t attempt = 0;
};

/// Renders `tpl` with the subset of `available` it needs and sends it through
/// the gateway at the registry's decoding defaults for the template role.
ChatResponse complete_prompt(Gateway& gateway, const ModelEntry& model, const PromptCall& call,
                             const PromptTemplate& tpl, const Bindings& available);

/// Runs `body(i)` for i in [0, n) on up to `parallelism` threads and
/// rethrows the exception of the lowest failing index.
void parallel_for_each_index(std::size_t n, std::size_t parallelism,
                             const std::function<void(std::size_t)>& body);

/// Lowercased, whitespace-collapsed form used for question de-duplication.
std::string normalize_question(std::string_view question);

}  // namespace tods
