// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "tods/error.hpp"

namespace tods {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Marker {
  char letter;          // 'Q' or 'A'
  std::size_t number;
  std::size_t begin;    // offset of the letter
  std::size_t end;      // offset just past the colon
};

// "Q12:" / "**A3:**" style markers; the letter must not continue a word.
std::vector<Marker> find_markers(std::string_view text) {
  std::vector<Marker> markers;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != 'Q' && c != 'A') continue;
    if (i > 0 && is_alnum(text[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_digit(text[j])) ++j;
    if (j == i + 1) continue;
    std::size_t number = 0;
    std::from_chars(text.data() + i + 1, text.data() + j, number);
    std::size_t k = j;
    while (k < text.size() && (text[k] == '*' || text[k] == ' ')) ++k;
    if (k >= text.size() || text[k] != ':') continue;
    ++k;
    while (k < text.size() && text[k] == '*') ++k;
    markers.push_back(Marker{c, number, i, k});
  }
  return markers;
}

std::string clean(std::string_view s) {
  std::size_t b = 0, e = s.size();
  auto junk = [](char c) { return is_space(c) || c == '*'; };
  while (b < e && junk(s[b])) ++b;
  while (e > b && junk(s[e - 1])) --e;
  // Collapse internal line breaks so multi-line answers stay on one record line.
  std::string out;
  bool pending_space = false;
  for (char c : s.substr(b, e - b)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string snippet(std::string_view text) {
  constexpr std::size_t kMax = 80;
  std::string s(text.substr(0, kMax));
  if (text.size() > kMax) s += "...";
  return s;
}

// Parses "2, 1, NOT_INCLUDED" into a RankList; nullopt if an entry is not
// an integer or the NOT_INCLUDED marker.
std::optional<RankList> parse_entries(std::string_view body) {
  RankList out;
  std::size_t i = 0;
  while (i <= body.size()) {
    auto comma = body.find(',', i);
    if (comma == std::string_view::npos) comma = body.size();
    auto item = body.substr(i, comma - i);
    while (!item.empty() && (is_space(item.front()) || item.front() == '"' || item.front() == '\''))
      item.remove_prefix(1);
    while (!item.empty() && (is_space(item.back()) || item.back() == '"' || item.back() == '\''))
      item.remove_suffix(1);
    if (item == kNotIncluded) {
      out.emplace_back(std::nullopt);
    } else {
      std::size_t value = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) return std::nullopt;
      out.emplace_back(value);
    }
    i = comma + 1;
  }
  return out;
}

}  // namespace

std::size_t count_question_markers(std::string_view text) {
  const auto markers = find_markers(text);
  return static_cast<std::size_t>(
      std::count_if(markers.begin(), markers.end(), [](const Marker& m) { return m.letter == 'Q'; }));
}

std::vector<ParsedQa> parse_qa_pairs(std::string_view text) {
  const auto markers = find_markers(text);
  std::vector<ParsedQa> pairs;
  for (std::size_t qi = 0; qi < markers.size(); ++qi) {
    const auto& q = markers[qi];
    if (q.letter != 'Q') continue;
    // Matching answer marker before the next question marker.
    std::size_t next_q = qi + 1;
    while (next_q < markers.size() && markers[next_q].letter != 'Q') ++next_q;
    std::optional<std::size_t> ai;
    for (std::size_t k = qi + 1; k < next_q; ++k) {
      if (markers[k].number == q.number) {
        ai = k;
        break;
      }
    }
    if (!ai) continue;
    const auto& a = markers[*ai];
    const std::size_t answer_end = next_q < markers.size() ? markers[next_q].begin : text.size();
    ParsedQa pair{clean(text.substr(q.end, a.begin - q.end)),
                  clean(text.substr(a.end, answer_end - a.end))};
    if (pair.question.empty() || pair.answer.empty()) continue;
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) {
    throw Error(ErrorKind::kParseFailure, "no Qk/Ak pairs in: " + snippet(text));
  }
  return pairs;
}

RankList extract_rank_list(std::string_view text, std::size_t pool_size) {
  if (pool_size < 2) throw Error(ErrorKind::kInvalidArgument, "pool_size must be at least 2");
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    const auto close = text.find(']', pos + 1);
    if (close == std::string_view::npos) break;
    auto entries = parse_entries(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
    if (!entries || entries->size() != pool_size) continue;

    std::vector<bool> seen(pool_size + 1, false);
    for (const auto& e : *entries) {
      if (!e) continue;
      if (*e < 1 || *e > pool_size) {
        throw Error(ErrorKind::kParseFailure,
                    "rank " + std::to_string(*e) + " outside 1.." + std::to_string(pool_size));
      }
      if (seen[*e]) {
        throw Error(ErrorKind::kParseFailure, "duplicate rank " + std::to_string(*e));
      }
      seen[*e] = true;
    }
    return *entries;
  }
  throw Error(ErrorKind::kParseFailure, "no ranking list of " + std::to_string(pool_size) +
                                            " entries in: " + snippet(text));
}

std::vector<std::size_t> positions_best_first(const RankList& ranks) {
  std::vector<std::size_t> ranked, dropped;
  for (std::size_t k = 0; k < ranks.size(); ++k) (ranks[k] ? ranked : dropped).push_back(k);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](std::size_t a, std::size_t b) { return *ranks[a] < *ranks[b]; });
  ranked.insert(ranked.end(), dropped.begin(), dropped.end());
  return ranked;
}

Ranking parse_ranking(std::string_view text, std::size_t pool_size,
                      const std::vector<std::size_t>& presentation) {
  if (presentation.size() != pool_size) {
    throw Error(ErrorKind::kInvalidArgument, "presentation does not cover the pool");
  }
  const auto best_first = positions_best_first(extract_rank_list(text, pool_size));
  std::vector<std::size_t> order;
  order.reserve(pool_size);
  for (auto position : best_first) order.push_back(presentation[position]);
  return Ranking(std::move(order));
}

int parse_judge_score(std::string_view text) {
  auto read_int = [&](std::size_t from) -> std::optional<std::pair<int, std::size_t>> {
    std::size_t i = from;
    while (i < text.size() && !is_digit(text[i])) {
      if (is_alnum(text[i])) return std::nullopt;  // a word before any digit
      ++i;
    }
    if (i >= text.size()) return std::nullopt;
    std::size_t j = i;
    while (j < text.size() && is_digit(text[j])) ++j;
    int v = 0;
    std::from_chars(text.data() + i, text.data() + j, v);
    return std::make_pair(v, j);
  };
  auto check = [&](int v) {
    if (v < 1 || v > 5) {
      throw Error(ErrorKind::kParseFailure, "score " + std::to_string(v) + " outside 1..5");
    }
    return v;
  };

  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto marker = lowered.find("score");
  if (marker != std::string::npos) {
    if (auto v = read_int(marker + 5)) return check(v->first);
  }

  std::vector<int> ints;
  for (std::size_t i = 0; i < text.size();) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_digit(text[j])) ++j;
    int v = 0;
    std::from_chars(text.data() + i, text.data() + j, v);
    ints.push_back(v);
    i = j;
  }
  if (ints.size() == 1) return check(ints.front());
  throw Error(ErrorKind::kParseFailure, "no judge score in: " + snippet(text));
}

}  // namespace tods
