// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file ranking.hpp
 * @brief Permutation mathematics shared by both evaluation stages.
 *
 * Rankings are stored best-first as a sequence of 0-based model indices.
 * Ranks exposed to scoring formulas are 1-based. Every function here is pure
 * and may be called concurrently.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tods {

/// Position of a model in the registry plus its display label.
struct ModelId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const ModelId&, const ModelId&) = default;
};

/// A total order over the models {0, ..., n-1}, best first.
class Ranking {
 public:
  Ranking() = default;

  /// Throws kInvalidArgument unless `order` is a permutation of 0..n-1.
  explicit Ranking(std::vector<std::size_t> order);

  static Ranking identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  std::size_t at(std::size_t position) const { return order_.at(position); }

  /// 1-based rank of `model`.
  std::size_t rank_of(std::size_t model) const;

  /// positions()[model] is the 0-based position of `model` (the inverse permutation).
  std::vector<std::size_t> positions() const;

  friend bool operator==(const Ranking&, const Ranking&) = default;
  friend auto operator<=>(const Ranking& a, const Ranking& b) { return a.order_ <=> b.order_; }

 private:
  std::vector<std::size_t> order_;
};

std::string to_string(const Ranking& ranking);

/// Number of discordant pairs between two rankings over the same index set,
/// computed as the sum of the inversion vector of a^-1 o b.
std::uint64_t kendall_distance(const Ranking& a, const Ranking& b);

struct KemenyOptions {
  /// Largest pool size for which the exhaustive search is allowed.
  std::size_t exhaustive_limit = 8;
  /// Pools at least this large are searched with the OpenMP kernel.
  std::size_t parallel_threshold = 6;
};

/// Kemeny-optimal consensus: the permutation minimising the summed Kendall
/// distance to `samples`. Ties go to the lexicographically smallest order.
Ranking kemeny_aggregate(std::span<const Ranking> samples, const KemenyOptions& options = {});

/// Single-threaded reference of kemeny_aggregate. Walks permutations in
/// lexicographic order with std::next_permutation.
Ranking kemeny_aggregate_serial(std::span<const Ranking> samples,
                                const KemenyOptions& options = {});

/// Summed Kendall distance from `candidate` to every sample.
std::uint64_t total_kendall_distance(std::span<const Ranking> samples, const Ranking& candidate);

struct MrrValue {
  double value = 0.0;
  std::size_t question_count = 0;
};

/// Mean over questions of 1/rank(subject), ranks 1-based.
MrrValue mrr(std::span<const Ranking> rankings_per_question, std::size_t subject);

/// Weight applied to an (subject, evaluator) MRR entry.
inline double alpha_weight(std::size_t subject, std::size_t evaluator, double alpha_self) {
  return subject == evaluator ? alpha_self : 1.0;
}

/// Sum over evaluators 0..pool_size-1 of alpha(subject, e) * MRR_e.
/// Throws kIncompleteTable when an evaluator is missing from `per_evaluator`.
double weighted_score(const std::map<std::size_t, MrrValue>& per_evaluator, std::size_t subject,
                      double alpha_self, std::size_t pool_size);

/// MRR entries for every (subject, evaluator) cell and the weighted totals.
struct ScoreTable {
  std::map<std::pair<std::size_t, std::size_t>, MrrValue> entries;  // (subject, evaluator)
  std::map<std::size_t, double> totals;
  double alpha_self = 0.8;
};

/// Builds a complete table from per-evaluator aggregated rankings:
/// `rankings[e][j]` is evaluator e's consensus ranking for question j.
ScoreTable build_score_table(const std::vector<std::vector<Ranking>>& rankings, double alpha_self);

/// Relative tolerance under which two totals count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct ArgmaxResult {
  std::size_t winner = 0;
  /// Number of entries tied at the maximum (1 when the maximum is unique).
  std::size_t tied = 1;
};

/// Index with the maximal score; ties resolved to the smallest index.
ArgmaxResult argmax_with_tiebreak(const std::map<std::size_t, double>& totals);

// ---------------------------------------------------------------------------
// Seeded shuffles
// ---------------------------------------------------------------------------

/// Identifies one ranking prompt. Every field enters the seed hash.
struct ShuffleKey {
  std::string dialogue_id;
  std::int64_t question = 0;
  std::string evaluator;
  std::string stage;
  std::int64_t sample = 0;
  std::int64_t attempt = 0;
};

/// 64-bit hash of (global_seed, key); stable across runs, compilers and platforms.
std::uint64_t stable_seed(std::uint64_t global_seed, const ShuffleKey& key);

/// SplitMix64 stream with unbiased bounded draws. Output is fully specified,
/// unlike std::uniform_int_distribution.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

/// Fisher-Yates permutation of 0..n-1 drawn from stable_seed(global_seed, key).
std::vector<std::size_t> seeded_permutation(std::size_t n, const ShuffleKey& key,
                                            std::uint64_t global_seed);

template <typename T>
std::vector<T> seeded_shuffle(const std::vector<T>& items, const ShuffleKey& key,
                              std::uint64_t global_seed) {
  const auto perm = seeded_permutation(items.size(), key, global_seed);
  std::vector<T> out;
  out.reserve(items.size());
  for (auto i : perm) out.push_back(items[i]);
  return out;
}

}  // namespace tods
