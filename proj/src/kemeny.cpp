// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

#include "tods/error.hpp"
#include "tods/ranking.hpp"

namespace tods {
namespace {

std::size_t validate(std::span<const Ranking> samples, const KemenyOptions& options) {
  if (samples.empty()) throw Error(ErrorKind::kInvalidArgument, "kemeny_aggregate needs samples");
  const std::size_t n = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != n) {
      throw Error(ErrorKind::kInvalidArgument, "samples range over different index sets");
    }
  }
  if (n > options.exhaustive_limit) {
    throw Error(ErrorKind::kUnsupportedPoolSize,
                "pool of " + std::to_string(n) + " exceeds exhaustive limit " +
                    std::to_string(options.exhaustive_limit));
  }
  return n;
}

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Writes the permutation with lexicographic rank `index` into `out`.
void unrank(std::uint64_t index, std::size_t n, std::vector<std::size_t>& out,
            std::vector<std::size_t>& pool) {
  pool.resize(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  out.resize(n);
  std::uint64_t f = factorial(n);
  for (std::size_t i = 0; i < n; ++i) {
    f /= (n - i);
    const auto digit = static_cast<std::size_t>(index / f);
    index %= f;
    out[i] = pool[digit];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
}

}  // namespace

Ranking kemeny_aggregate(std::span<const Ranking> samples, const KemenyOptions& options) {
  const std::size_t n = validate(samples, options);
  if (n < options.parallel_threshold) return kemeny_aggregate_serial(samples, options);

  // disagree[a * n + b]: samples placing b ahead of a. A candidate that puts
  // a before b pays that many discordant pairs.
  std::vector<std::uint64_t> disagree(n * n, 0);
  for (const auto& s : samples) {
    const auto& o = s.order();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) ++disagree[o[j] * n + o[i]];
    }
  }

  const auto count = static_cast<std::int64_t>(factorial(n));
  std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
  std::int64_t best_index = 0;

#pragma omp parallel
  {
    std::uint64_t local_cost = std::numeric_limits<std::uint64_t>::max();
    std::int64_t local_index = 0;
    std::vector<std::size_t> perm;
    std::vector<std::size_t> scratch;
#pragma omp for schedule(static) nowait
    for (std::int64_t idx = 0; idx < count; ++idx) {
      unrank(static_cast<std::uint64_t>(idx), n, perm, scratch);
      std::uint64_t cost = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) cost += disagree[perm[i] * n + perm[j]];
      }
      if (cost < local_cost) {  // strict: keeps the smallest index per thread
        local_cost = cost;
        local_index = idx;
      }
    }
#pragma omp critical(tods_kemeny_merge)
    {
      if (local_cost < best_cost || (local_cost == best_cost && local_index < best_index)) {
        best_cost = local_cost;
        best_index = local_index;
      }
    }
  }

  std::vector<std::size_t> perm;
  std::vector<std::size_t> scratch;
  unrank(static_cast<std::uint64_t>(best_index), n, perm, scratch);
  return Ranking(std::move(perm));
}

Ranking kemeny_aggregate_serial(std::span<const Ranking> samples, const KemenyOptions& options) {
  const std::size_t n = validate(samples, options);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  Ranking best = Ranking::identity(n);
  std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
  do {
    Ranking candidate(perm);
    const auto cost = total_kendall_distance(samples, candidate);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace tods
