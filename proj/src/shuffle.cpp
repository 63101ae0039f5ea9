// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <limits>
#include <numeric>

#include "tods/error.hpp"
#include "tods/ranking.hpp"

namespace tods {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

struct Fnv1a {
  std::uint64_t h = kFnvOffset;

  void byte(std::uint8_t b) {
    h ^= b;
    h *= kFnvPrime;
  }
  // Fixed little-endian width so the hash does not depend on host byte order.
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  // Length prefix keeps ("ab","c") and ("a","bc") apart.
  void str(const std::string& s) {
    u64(s.size());
    for (unsigned char c : s) byte(c);
  }
};

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t stable_seed(std::uint64_t global_seed, const ShuffleKey& key) {
  Fnv1a f;
  f.u64(global_seed);
  f.str(key.dialogue_id);
  f.u64(static_cast<std::uint64_t>(key.question));
  f.str(key.evaluator);
  f.str(key.stage);
  f.u64(static_cast<std::uint64_t>(key.sample));
  f.u64(static_cast<std::uint64_t>(key.attempt));
  return mix64(f.h);
}

std::uint64_t DeterministicRng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

std::uint64_t DeterministicRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::kInvalidArgument, "empty range");
  // Rejection keeps the draw unbiased: discard the incomplete top bucket.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double DeterministicRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, const ShuffleKey& key,
                                            std::uint64_t global_seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  DeterministicRng rng(stable_seed(global_seed, key));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace tods
