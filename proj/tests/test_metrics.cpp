// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tods/error.hpp"
#include "tods/metrics.hpp"

using namespace tods;
using namespace tods::metrics;

namespace {

TokenSequence random_tokens(std::mt19937_64& rng, std::size_t max_len) {
  static const char* vocab[] = {"a", "b", "c", "d", "e"};
  TokenSequence t(1 + rng() % max_len);
  for (auto& w : t) w = vocab[rng() % 5];
  return t;
}

}  // namespace

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("The Cat, sat!  on-the mat."),
            (TokenSequence{"the", "cat", "sat", "on", "the", "mat"}));
  EXPECT_TRUE(tokenize(" ,;; ").empty());
  const auto once = tokenize("Ab C");
  std::string joined;
  for (const auto& w : once) joined += w + " ";
  EXPECT_EQ(tokenize(joined), once);
  EXPECT_EQ(tokenize("café au lait").size(), 3u);
}

TEST(Rouge, Fixtures) {
  const auto c = tokenize("the cat sat"), r = tokenize("the cat ran");
  EXPECT_NEAR(rouge(c, r, RougeVariant::kRouge1).value, 2.0 / 3.0, 1e-9);
  for (auto v : {RougeVariant::kRouge1, RougeVariant::kRouge2, RougeVariant::kRougeL}) {
    EXPECT_DOUBLE_EQ(rouge(c, c, v).value, 1.0);
    EXPECT_DOUBLE_EQ(rouge(tokenize("x y"), tokenize("p q"), v).value, 0.0);
  }
  const auto empty = rouge({}, r, RougeVariant::kRouge1);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_TRUE(empty.degenerate);
}

TEST(Rouge, CountsMatchOracles) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_tokens(rng, 12), b = random_tokens(rng, 12);
    for (std::size_t n = 1; n <= 4; ++n) {
      ASSERT_EQ(ngram_overlap(a, b, n), oracle::clipped_overlap(a, b, n));
    }
    ASSERT_EQ(lcs_length(a, b), oracle::lcs(a, b));
    ASSERT_EQ(lcs_length(a, b), lcs_length(b, a));
    for (auto v : {RougeVariant::kRouge1, RougeVariant::kRouge2, RougeVariant::kRougeL}) {
      const double s = rouge(a, b, v).value;
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
    }
  }
}

TEST(Bleu, Fixtures) {
  std::vector<TokenSequence> refs = {tokenize("the quick brown fox jumps over the dog"),
                                     tokenize("a b")};
  EXPECT_DOUBLE_EQ(bleu(refs, refs), 1.0);

  // Full precision at every order, 4 of 8 reference tokens.
  std::vector<TokenSequence> cand = {tokenize("the quick brown fox")};
  std::vector<TokenSequence> ref = {tokenize("the quick brown fox jumps over the dog")};
  EXPECT_NEAR(bleu(cand, ref), std::exp(1.0 - 8.0 / 4.0), 1e-12);

  std::vector<TokenSequence> none = {tokenize("w x y z")};
  EXPECT_LT(bleu(none, ref), 1e-6);

  std::vector<TokenSequence> one = {tokenize("a")};
  EXPECT_THROW(bleu(one, refs), Error);
}

TEST(Jackknife, Fixtures) {
  const std::vector<double> constant(7, 0.4);
  auto ci = jackknife_ci(constant);
  EXPECT_NEAR(ci.mean, 0.4, 1e-15);
  EXPECT_EQ(ci.halfwidth, 0.0);

  const std::vector<double> two = {0.0, 1.0};
  ci = jackknife_ci(two);
  EXPECT_DOUBLE_EQ(ci.mean, 0.5);
  // Sample variance 0.5, divided by n = 2.
  EXPECT_NEAR(ci.variance, 0.25, 1e-15);
  EXPECT_NEAR(ci.halfwidth, 12.706204736174698 * 0.5, 1e-9);

  const std::vector<double> single = {1.0};
  try {
    jackknife_ci(single);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientSample);
  }
}

TEST(Jackknife, MeanVarianceClosedForm) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.3, 0.1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> xs(2 + rng() % 40);
    for (auto& x : xs) x = g(rng);
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const auto ci = jackknife_ci(xs);
    EXPECT_NEAR(ci.mean, mean, 1e-12);
    EXPECT_NEAR(ci.variance, ss / (n - 1) / n, 1e-12);
  }
}

TEST(Jackknife, HalfwidthShrinks) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  double prev = 1e9;
  for (std::size_t n : {10, 100, 1000}) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(rng);
    const auto h = jackknife_ci(xs).halfwidth;
    EXPECT_LT(h, prev);
    prev = h;
  }
}

TEST(Agreement, Fixtures) {
  const std::vector<std::string> a = {"1", "2", "3", "2"};
  auto r = agreement(a, a);
  EXPECT_DOUBLE_EQ(r.cohen_kappa, 1.0);
  EXPECT_DOUBLE_EQ(r.exact_agreement, 100.0);

  // p_o = 0.5, p_e = 0.5.
  const std::vector<std::string> x = {"y", "y", "n", "n"}, y = {"y", "n", "y", "n"};
  r = agreement(x, y);
  EXPECT_NEAR(r.cohen_kappa, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.exact_agreement, 50.0);
  EXPECT_DOUBLE_EQ(agreement(y, x).cohen_kappa, r.cohen_kappa);

  const std::vector<std::string> constant = {"k", "k"}, other = {"k", "j"};
  EXPECT_DOUBLE_EQ(agreement(constant, constant).cohen_kappa, 1.0);
  EXPECT_NO_THROW(agreement(constant, other));
}

TEST(Agreement, HumanEvaluationTableFixture) {
  // Per-criterion rows of a published human evaluation, parsed and averaged.
  const auto rows = nlohmann::json::parse(R"([
    {"cohen_kappa": 0.12, "exact_agreement": 42.0},
    {"cohen_kappa": 0.17, "exact_agreement": 42.0},
    {"cohen_kappa": 0.14, "exact_agreement": 40.0},
    {"cohen_kappa": 0.09, "exact_agreement": 34.0}])");
  std::vector<AgreementReport> reports;
  for (const auto& r : rows) reports.push_back(AgreementReport::from_json(r));
  const auto avg = average(reports);
  EXPECT_NEAR(avg.cohen_kappa, 0.13, 1e-12);
  EXPECT_NEAR(avg.exact_agreement, 39.5, 1e-12);
}

TEST(Corpus, IdenticalCandidatesScorePerfect) {
  const std::vector<std::string> refs = {"the meeting is at noon", "bring the red folder please"};
  const auto report = evaluate_corpus(refs, refs);
  for (const auto& name : {"rouge1", "rouge2", "rougeL", "bleu"}) {
    EXPECT_DOUBLE_EQ(report.values.at(name).score, 100.0) << name;
    EXPECT_DOUBLE_EQ(report.values.at(name).halfwidth, 0.0) << name;
  }
  const auto j = report.to_json();
  EXPECT_EQ(j["stemming"], false);
  EXPECT_EQ(j["stopwords"], false);
}

TEST(Corpus, TwoExampleRouge1Mean) {
  const std::vector<std::string> cand = {"the cat sat", "a b c d"};
  const std::vector<std::string> ref = {"the cat ran", "a b"};
  // 2/3 and F1(P=1/2, R=1) = 2/3.
  const auto report = evaluate_corpus(cand, ref);
  EXPECT_NEAR(report.values.at("rouge1").score, 100.0 * (2.0 / 3.0 + 2.0 / 3.0) / 2.0, 1e-9);
  EXPECT_TRUE(report.values.at("rouge1").has_interval);
}

TEST(Corpus, ParallelMatchesSerial) {
  std::mt19937_64 rng(6);
  std::vector<std::string> cand, ref;
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (auto& w : random_tokens(rng, 30)) a += w + " ";
    for (auto& w : random_tokens(rng, 30)) b += w + " ";
    cand.push_back(a);
    ref.push_back(b);
  }
  const auto p = score_examples(cand, ref), s = score_examples_serial(cand, ref);
  ASSERT_EQ(p.size(), s.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].rouge1, s[i].rouge1);
    EXPECT_EQ(p[i].rouge2, s[i].rouge2);
    EXPECT_EQ(p[i].rougeL, s[i].rougeL);
  }
}
