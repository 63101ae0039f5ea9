// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "tods/metrics.hpp"
#include "tods/ranking.hpp"

using namespace tods;

namespace {

std::vector<Ranking> random_samples(std::size_t n, std::size_t count) {
  std::mt19937_64 rng(n * 1000 + count);
  std::vector<Ranking> out;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), 0);
    std::shuffle(o.begin(), o.end(), rng);
    out.emplace_back(std::move(o));
  }
  return out;
}

void BM_KemenyParallel(benchmark::State& state) {
  const auto samples = random_samples(static_cast<std::size_t>(state.range(0)), 5);
  KemenyOptions options;
  options.parallel_threshold = 1;  // force the OpenMP kernel
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_aggregate(samples, options));
}

void BM_KemenySerial(benchmark::State& state) {
  const auto samples = random_samples(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_aggregate_serial(samples));
}

BENCHMARK(BM_KemenyParallel)->DenseRange(4, 8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KemenySerial)->DenseRange(4, 8)->Unit(benchmark::kMicrosecond);

std::pair<std::vector<std::string>, std::vector<std::string>> corpus(std::size_t n) {
  static const char* words[] = {"the", "caller", "needs", "a", "taxi", "to", "airport", "at",
                                "seven", "pm", "booking", "confirmed", "for", "two", "people"};
  std::mt19937_64 rng(n);
  auto text = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) s.push_back(' ');
      s += words[rng() % std::size(words)];
    }
    return s;
  };
  std::vector<std::string> c, r;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(text(40 + rng() % 40));
    r.push_back(text(40 + rng() % 40));
  }
  return {c, r};
}

void BM_ScoreExamplesParallel(benchmark::State& state) {
  const auto [c, r] = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::score_examples(c, r));
}

void BM_ScoreExamplesSerial(benchmark::State& state) {
  const auto [c, r] = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::score_examples_serial(c, r));
}

BENCHMARK(BM_ScoreExamplesParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreExamplesSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
