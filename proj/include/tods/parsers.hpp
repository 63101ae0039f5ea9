// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tods/ranking.hpp"

namespace tods {

inline constexpr std::string_view kNotIncluded = "NOT_INCLUDED";

struct ParsedQa {
  std::string question;
  std::string answer;
};

/// Extracts "Qk: ... Ak: ..." pairs in source order. Throws kParseFailure
/// when none are found.
std::vector<ParsedQa> parse_qa_pairs(std::string_view text);

/// Number of "Qk:" markers in `text`.
std::size_t count_question_markers(std::string_view text);

/// One entry per presented answer: its 1-based rank, or nullopt when the
/// evaluator wrote NOT_INCLUDED in its place.
using RankList = std::vector<std::optional<std::size_t>>;

/// The first bracketed list with `pool_size` entries, validated.
RankList extract_rank_list(std::string_view text, std::size_t pool_size);

/// Presented positions best first: ranked entries by rank, then
/// NOT_INCLUDED entries in presentation order.
std::vector<std::size_t> positions_best_first(const RankList& ranks);

/// Parses an evaluator reply into a Ranking over model indices.
/// `presentation[k]` is the model shown at position k (0-based).
Ranking parse_ranking(std::string_view text, std::size_t pool_size,
                      const std::vector<std::size_t>& presentation);

/// Integer 1..5 after "Score:", or a lone integer when the marker is absent.
int parse_judge_score(std::string_view text);

}  // namespace tods
