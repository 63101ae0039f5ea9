// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tods/error.hpp"
#include "tods/ranking.hpp"

namespace tods {

Ranking::Ranking(std::vector<std::size_t> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (auto m : order_) {
    if (m >= order_.size() || seen[m]) {
      throw Error(ErrorKind::kInvalidArgument, "not a permutation: " + to_string(*this));
    }
    seen[m] = true;
  }
}

Ranking Ranking::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return Ranking(std::move(order));
}

std::size_t Ranking::rank_of(std::size_t model) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == model) return i + 1;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "model " + std::to_string(model) + " absent from ranking " + to_string(*this));
}

std::vector<std::size_t> Ranking::positions() const {
  std::vector<std::size_t> pos(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) pos[order_[i]] = i;
  return pos;
}

std::string to_string(const Ranking& ranking) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (i) os << ", ";
    os << ranking.order()[i];
  }
  os << ']';
  return os.str();
}

std::uint64_t kendall_distance(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInvalidArgument, "rankings differ in length: " +
                                                 std::to_string(a.size()) + " vs " +
                                                 std::to_string(b.size()));
  }
  // composed[k] = position in a of the model b places at k; its inversion
  // vector counts, for every k, the earlier entries that exceed composed[k].
  const auto pos_a = a.positions();
  const std::size_t n = b.size();
  std::vector<std::size_t> composed(n);
  for (std::size_t k = 0; k < n; ++k) composed[k] = pos_a[b.order()[k]];

  std::uint64_t total = 0;
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t earlier = 0; earlier < k; ++earlier) {
      if (composed[earlier] > composed[k]) ++total;
    }
  }
  return total;
}

std::uint64_t total_kendall_distance(std::span<const Ranking> samples, const Ranking& candidate) {
  std::uint64_t total = 0;
  for (const auto& s : samples) total += kendall_distance(s, candidate);
  return total;
}

MrrValue mrr(std::span<const Ranking> rankings_per_question, std::size_t subject) {
  if (rankings_per_question.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "mrr needs at least one question");
  }
  // Accumulate by rank so that equal rank multisets give bit-identical sums.
  const std::size_t n = rankings_per_question.front().size();
  std::vector<std::size_t> rank_counts(n + 1, 0);
  for (const auto& r : rankings_per_question) {
    if (r.size() != n) {
      throw Error(ErrorKind::kInvalidArgument, "question rankings differ in pool size");
    }
    ++rank_counts[r.rank_of(subject)];
  }
  double sum = 0.0;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    sum += static_cast<double>(rank_counts[rank]) / static_cast<double>(rank);
  }
  const auto j = rankings_per_question.size();
  return MrrValue{sum / static_cast<double>(j), j};
}

double weighted_score(const std::map<std::size_t, MrrValue>& per_evaluator, std::size_t subject,
                      double alpha_self, std::size_t pool_size) {
  if (!(alpha_self > 0.0 && alpha_self <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha_self must lie in (0, 1]");
  }
  double total = 0.0;
  for (std::size_t e = 0; e < pool_size; ++e) {
    auto it = per_evaluator.find(e);
    if (it == per_evaluator.end()) {
      throw Error(ErrorKind::kIncompleteTable,
                  "no MRR entry for evaluator " + std::to_string(e) + " (subject " +
                      std::to_string(subject) + ")");
    }
    total += alpha_weight(subject, e, alpha_self) * it->second.value;
  }
  return total;
}

ScoreTable build_score_table(const std::vector<std::vector<Ranking>>& rankings, double alpha_self) {
  const std::size_t pool = rankings.size();
  ScoreTable table;
  table.alpha_self = alpha_self;
  for (std::size_t subject = 0; subject < pool; ++subject) {
    std::map<std::size_t, MrrValue> per_evaluator;
    for (std::size_t e = 0; e < pool; ++e) {
      const auto value = mrr(rankings[e], subject);
      per_evaluator[e] = value;
      table.entries[{subject, e}] = value;
    }
    table.totals[subject] = weighted_score(per_evaluator, subject, alpha_self, pool);
  }
  return table;
}

ArgmaxResult argmax_with_tiebreak(const std::map<std::size_t, double>& totals) {
  if (totals.empty()) throw Error(ErrorKind::kInvalidArgument, "argmax of an empty table");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [_, v] : totals) best = std::max(best, v);
  const double slack = kTieTolerance * std::max(1.0, std::abs(best));

  ArgmaxResult result;
  result.tied = 0;
  bool found = false;
  for (const auto& [idx, v] : totals) {  // std::map iterates in index order
    if (v >= best - slack) {
      if (!found) result.winner = idx;
      found = true;
      ++result.tied;
    }
  }
  return result;
}

}  // namespace tods
