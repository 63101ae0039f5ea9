// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "tods/error.hpp"

namespace tods::metrics {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::string join_ngram(const TokenSequence& tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key.push_back('\x1f');
    key += tokens[start + i];
  }
  return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(const TokenSequence& tokens,
                                                          std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[join_ngram(tokens, i, n)];
  return counts;
}

std::size_t ngram_total(const TokenSequence& tokens, std::size_t n) {
  return tokens.size() >= n ? tokens.size() - n + 1 : 0;
}

double f1(double overlap, double candidate_total, double reference_total) {
  if (overlap == 0.0 || candidate_total == 0.0 || reference_total == 0.0) return 0.0;
  const double p = overlap / candidate_total;
  const double r = overlap / reference_total;
  return 2.0 * p * r / (p + r);
}

// Sufficient statistics of one candidate/reference pair for corpus BLEU.
struct BleuStats {
  std::array<double, kBleuMaxOrder> matches{};
  std::array<double, kBleuMaxOrder> totals{};
  double candidate_length = 0.0;
  double reference_length = 0.0;

  BleuStats& operator+=(const BleuStats& o) {
    for (std::size_t k = 0; k < kBleuMaxOrder; ++k) {
      matches[k] += o.matches[k];
      totals[k] += o.totals[k];
    }
    candidate_length += o.candidate_length;
    reference_length += o.reference_length;
    return *this;
  }
  BleuStats& operator-=(const BleuStats& o) {
    for (std::size_t k = 0; k < kBleuMaxOrder; ++k) {
      matches[k] -= o.matches[k];
      totals[k] -= o.totals[k];
    }
    candidate_length -= o.candidate_length;
    reference_length -= o.reference_length;
    return *this;
  }
};

BleuStats bleu_stats(const TokenSequence& candidate, const TokenSequence& reference) {
  BleuStats s;
  for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
    s.matches[n - 1] = static_cast<double>(ngram_overlap(candidate, reference, n));
    s.totals[n - 1] = static_cast<double>(ngram_total(candidate, n));
  }
  s.candidate_length = static_cast<double>(candidate.size());
  s.reference_length = static_cast<double>(reference.size());
  return s;
}

double bleu_from_stats(const BleuStats& s) {
  if (s.candidate_length <= 0.0) return 0.0;
  // Orders longer than every candidate have no n-grams at all and are left
  // out of the geometric mean rather than smoothed.
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t k = 0; k < kBleuMaxOrder; ++k) {
    if (s.totals[k] <= 0.0) continue;
    const double p = s.matches[k] > 0.0 ? s.matches[k] / s.totals[k] : kBleuEpsilon;
    log_sum += std::log(p);
    ++orders;
  }
  const double geo = std::exp(log_sum / static_cast<double>(orders));
  const double bp = s.candidate_length > s.reference_length
                        ? 1.0
                        : std::exp(1.0 - s.reference_length / s.candidate_length);
  return std::min(1.0, bp * geo);
}

void check_paired(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::kInvalidArgument, "unpaired inputs: " + std::to_string(a) +
                                                 " candidates vs " + std::to_string(b) +
                                                 " references");
  }
}

double t_quantile(double confidence, std::size_t dof) {
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

// Jackknife from precomputed leave-one-out replicates.
ConfidenceInterval jackknife_from_replicates(const std::vector<double>& replicates,
                                             double full_estimate, double confidence) {
  const auto n = static_cast<double>(replicates.size());
  const double centre = std::accumulate(replicates.begin(), replicates.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : replicates) ss += (r - centre) * (r - centre);
  ConfidenceInterval ci;
  ci.variance = (n - 1.0) / n * ss;
  ci.mean = n * full_estimate - (n - 1.0) * centre;
  ci.halfwidth = t_quantile(confidence, replicates.size() - 1) * std::sqrt(ci.variance);
  return ci;
}

ExampleScores score_one(const std::string& candidate, const std::string& reference) {
  const auto c = tokenize(candidate);
  const auto r = tokenize(reference);
  const auto r1 = rouge(c, r, RougeVariant::kRouge1);
  const auto r2 = rouge(c, r, RougeVariant::kRouge2);
  const auto rl = rouge(c, r, RougeVariant::kRougeL);
  return ExampleScores{r1.value, r2.value, rl.value, r1.degenerate};
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t ngram_overlap(const TokenSequence& candidate, const TokenSequence& reference,
                          std::size_t n) {
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  const TokenSequence& outer = a.size() >= b.size() ? a : b;
  const TokenSequence& inner = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(inner.size() + 1, 0), cur(inner.size() + 1, 0);
  for (const auto& token : outer) {
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      cur[j] = token == inner[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[inner.size()];
}

Score rouge(const TokenSequence& candidate, const TokenSequence& reference,
            RougeVariant variant) {
  if (candidate.empty() || reference.empty()) return Score{0.0, true};
  switch (variant) {
    case RougeVariant::kRouge1:
    case RougeVariant::kRouge2: {
      const std::size_t n = variant == RougeVariant::kRouge1 ? 1 : 2;
      const auto overlap = static_cast<double>(ngram_overlap(candidate, reference, n));
      return Score{f1(overlap, static_cast<double>(ngram_total(candidate, n)),
                      static_cast<double>(ngram_total(reference, n))),
                   false};
    }
    case RougeVariant::kRougeL: {
      const auto lcs = static_cast<double>(lcs_length(candidate, reference));
      return Score{f1(lcs, static_cast<double>(candidate.size()),
                      static_cast<double>(reference.size())),
                   false};
    }
  }
  return Score{};
}

double bleu(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  check_paired(candidates.size(), references.size());
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "bleu needs at least one pair");
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += bleu_stats(candidates[i], references[i]);
  }
  return bleu_from_stats(total);
}

ConfidenceInterval jackknife_ci(std::span<const double> scores, double confidence) {
  if (scores.size() < 2) {
    throw Error(ErrorKind::kInsufficientSample, "jackknife needs at least 2 scores, got " +
                                                    std::to_string(scores.size()));
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "confidence must lie in (0, 1)");
  }
  const auto n = static_cast<double>(scores.size());
  const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  std::vector<double> replicates(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) replicates[i] = (sum - scores[i]) / (n - 1.0);
  auto ci = jackknife_from_replicates(replicates, sum / n, confidence);
  ci.mean = sum / n;  // the jackknife bias of the mean is zero
  return ci;
}

nlohmann::json AgreementReport::to_json() const {
  return {{"cohen_kappa", cohen_kappa}, {"exact_agreement", exact_agreement}};
}

AgreementReport AgreementReport::from_json(const nlohmann::json& j) {
  return AgreementReport{j.at("cohen_kappa").get<double>(), j.at("exact_agreement").get<double>()};
}

AgreementReport agreement(std::span<const std::string> labels_a,
                          std::span<const std::string> labels_b) {
  check_paired(labels_a.size(), labels_b.size());
  if (labels_a.empty()) throw Error(ErrorKind::kInvalidArgument, "agreement needs labels");
  const auto n = static_cast<double>(labels_a.size());
  std::map<std::string, double> freq_a, freq_b;
  double observed = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    if (labels_a[i] == labels_b[i]) observed += 1.0;
    freq_a[labels_a[i]] += 1.0;
    freq_b[labels_b[i]] += 1.0;
  }
  const double p_o = observed / n;
  double p_e = 0.0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) p_e += (count / n) * (it->second / n);
  }
  AgreementReport report;
  report.exact_agreement = 100.0 * p_o;
  if (p_e >= 1.0) {
    if (p_o < 1.0) throw Error(ErrorKind::kUndefinedKappa, "chance agreement is 1");
    report.cohen_kappa = 1.0;
  } else {
    report.cohen_kappa = (p_o - p_e) / (1.0 - p_e);
  }
  return report;
}

AgreementReport average(std::span<const AgreementReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::kInvalidArgument, "nothing to average");
  AgreementReport out;
  for (const auto& r : reports) {
    out.cohen_kappa += r.cohen_kappa;
    out.exact_agreement += r.exact_agreement;
  }
  out.cohen_kappa /= static_cast<double>(reports.size());
  out.exact_agreement /= static_cast<double>(reports.size());
  return out;
}

std::vector<ExampleScores> score_examples(std::span<const std::string> candidates,
                                          std::span<const std::string> references) {
  check_paired(candidates.size(), references.size());
  std::vector<ExampleScores> out(candidates.size());
  const auto n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        score_one(candidates[static_cast<std::size_t>(i)], references[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<ExampleScores> score_examples_serial(std::span<const std::string> candidates,
                                                 std::span<const std::string> references) {
  check_paired(candidates.size(), references.size());
  std::vector<ExampleScores> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back(score_one(candidates[i], references[i]));
  }
  return out;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  for (const auto& [name, v] : values) {
    j[name] = {{"score", v.score}, {"halfwidth", v.has_interval ? nlohmann::json(v.halfwidth)
                                                                : nlohmann::json(nullptr)}};
  }
  j["examples"] = examples;
  j["degenerate"] = degenerate;
  j["stemming"] = false;
  j["stopwords"] = false;
  return j;
}

MetricReport evaluate_corpus(std::span<const std::string> candidates,
                             std::span<const std::string> references, double confidence) {
  check_paired(candidates.size(), references.size());
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "empty corpus");
  const auto per_example = score_examples(candidates, references);
  const std::size_t n = per_example.size();

  MetricReport report;
  report.examples = n;
  auto add_mean = [&](const std::string& name, auto field) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = per_example[i].*field;
    MetricValue v;
    if (n >= 2) {
      const auto ci = jackknife_ci(xs, confidence);
      v.score = 100.0 * ci.mean;
      v.halfwidth = 100.0 * ci.halfwidth;
      v.has_interval = true;
    } else {
      v.score = 100.0 * xs.front();
    }
    report.values[name] = v;
  };
  add_mean("rouge1", &ExampleScores::rouge1);
  add_mean("rouge2", &ExampleScores::rouge2);
  add_mean("rougeL", &ExampleScores::rougeL);
  for (const auto& e : per_example) report.degenerate += e.degenerate ? 1 : 0;

  std::vector<BleuStats> stats(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    stats[k] = bleu_stats(tokenize(candidates[k]), tokenize(references[k]));
  }
  BleuStats total;
  for (const auto& s : stats) total += s;
  MetricValue b;
  b.score = 100.0 * bleu_from_stats(total);
  if (n >= 2) {
    std::vector<double> replicates(n);
    for (std::size_t i = 0; i < n; ++i) {
      BleuStats loo = total;
      loo -= stats[i];
      replicates[i] = bleu_from_stats(loo);
    }
    const auto ci = jackknife_from_replicates(replicates, bleu_from_stats(total), confidence);
    b.halfwidth = 100.0 * ci.halfwidth;
    b.has_interval = true;
  }
  report.values["bleu"] = b;
  return report;
}

}  // namespace tods::metrics
