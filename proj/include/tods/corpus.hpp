// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tods/types.hpp"

namespace tods {

enum class CorpusFormat {
  kNative,     // {id, turns:[{speaker,text}], task_prompt, header?, reference?}
  kSamsum,     // {id, dialogue:"A: ...\r\nB: ...", summary?}
  kDialogsum,  // {fname|id, dialogue:"#Person1#: ...\n#Person2#: ...", summary?}
};

CorpusFormat corpus_format_from_string(std::string_view name);
std::string_view to_string(CorpusFormat format);

struct CorpusStats {
  std::size_t dialogues = 0;
  double avg_turns = 0.0;
  double avg_tokens = 0.0;  // metric tokenizer over all utterances
};

struct Corpus {
  std::vector<Dialogue> dialogues;
  CorpusStats stats;
};

/// Splits "Speaker: text" lines (LF or CRLF); lines without a speaker are
/// appended to the previous turn.
std::vector<Turn> split_turns(std::string_view text);

CorpusStats corpus_stats(const std::vector<Dialogue>& dialogues);

/// Loads line-delimited records. Formats without a task prompt take
/// `default_task_prompt`, with [Header] filled from the record when present.
/// Errors carry the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::string& default_task_prompt = {});

/// Parses one record; exposed for tests.
Dialogue parse_corpus_record(const nlohmann::json& record, CorpusFormat format,
                             const std::string& default_task_prompt);

}  // namespace tods
