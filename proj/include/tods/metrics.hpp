// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file metrics.hpp
 * @brief Reference-based summary metrics, jackknife intervals, and
 *        annotator agreement.
 *
 * Tokens are lowercased runs of ASCII alphanumerics; bytes >= 0x80 count as
 * word characters so UTF-8 words stay whole. No stemming, no stopword list.
 */

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tods::metrics {

using TokenSequence = std::vector<std::string>;

TokenSequence tokenize(std::string_view text);

enum class RougeVariant { kRouge1, kRouge2, kRougeL };

struct Score {
  double value = 0.0;
  /// Set when an input was empty after tokenization; value is then 0.
  bool degenerate = false;
};

/// Clipped n-gram overlap count between candidate and reference.
std::size_t ngram_overlap(const TokenSequence& candidate, const TokenSequence& reference,
                          std::size_t n);

/// Longest common subsequence length, O(|a|*|b|) time and O(min) memory.
std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

/// F1 (beta = 1) ROUGE-1/2/L.
Score rouge(const TokenSequence& candidate, const TokenSequence& reference, RougeVariant variant);

inline constexpr double kBleuEpsilon = 1e-9;
inline constexpr std::size_t kBleuMaxOrder = 4;

/// Corpus BLEU: clipped counts summed over all pairs, geometric mean of the
/// four modified precisions, brevity penalty on total lengths. A precision
/// with zero matches contributes kBleuEpsilon; an order with no candidate
/// n-grams at all is left out of the mean.
double bleu(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);

struct ConfidenceInterval {
  double mean = 0.0;
  double halfwidth = 0.0;
  double variance = 0.0;
};

/// Leave-one-out jackknife of the mean with a Student-t interval.
ConfidenceInterval jackknife_ci(std::span<const double> scores, double confidence = 0.95);

struct AgreementReport {
  double cohen_kappa = 0.0;
  double exact_agreement = 0.0;  // percent

  nlohmann::json to_json() const;
  static AgreementReport from_json(const nlohmann::json& j);
};

AgreementReport agreement(std::span<const std::string> labels_a,
                          std::span<const std::string> labels_b);

/// Unweighted mean of several reports, as when averaging per-criterion rows.
AgreementReport average(std::span<const AgreementReport> reports);

// ---------------------------------------------------------------------------
// Corpus scoring
// ---------------------------------------------------------------------------

struct ExampleScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  bool degenerate = false;
};

/// Per-example ROUGE scores over paired texts; OpenMP over examples.
std::vector<ExampleScores> score_examples(std::span<const std::string> candidates,
                                          std::span<const std::string> references);

/// Single-threaded reference for score_examples.
std::vector<ExampleScores> score_examples_serial(std::span<const std::string> candidates,
                                                 std::span<const std::string> references);

struct MetricValue {
  double score = 0.0;  // percent
  double halfwidth = 0.0;
  bool has_interval = false;
};

/// Corpus-level report; scores in percent.
struct MetricReport {
  std::map<std::string, MetricValue> values;  // rouge1, rouge2, rougeL, bleu
  std::size_t examples = 0;
  std::size_t degenerate = 0;

  /// Flat record: metric name -> {score, halfwidth}.
  nlohmann::json to_json() const;
};

/// ROUGE means with jackknife halfwidths, plus corpus BLEU whose interval is
/// the jackknife over leave-one-out corpus BLEU values.
MetricReport evaluate_corpus(std::span<const std::string> candidates,
                             std::span<const std::string> references, double confidence = 0.95);

}  // namespace tods::metrics
