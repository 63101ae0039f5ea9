// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

// Acceptance suite: one PASS/FAIL line per criterion. The exit status is
// non-zero when any attainable criterion fails.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tods/datastore.hpp"
#include "tods/dispatch.hpp"
#include "tods/config.hpp"
#include "tods/metrics.hpp"
#include "tods/parsers.hpp"
#include "tods/ranking.hpp"
#include "tods/synthetic.hpp"
#include "tods/types.hpp"

using namespace tods;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s = 0.0;  // 0 = none
  std::function<Outcome()> run;
  bool attainable = true;
};

std::string seconds(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

// ---------------------------------------------------------------------------
// Ranking math
// ---------------------------------------------------------------------------

/// Precomputed Kendall distances between all permutations of n items, with
/// permutations in lexicographic order so index order is lexicographic order.
struct PermTable {
  std::vector<oracle::Order> perms;
  std::vector<std::vector<std::uint64_t>> dist;

  explicit PermTable(std::size_t n) {
    perms = oracle::all_permutations(n);
    std::sort(perms.begin(), perms.end());
    dist.assign(perms.size(), std::vector<std::uint64_t>(perms.size()));
    for (std::size_t i = 0; i < perms.size(); ++i) {
      for (std::size_t j = 0; j < perms.size(); ++j) {
        dist[i][j] = oracle::discordant_pairs(perms[i], perms[j]);
      }
    }
  }
};

/// Enumerates every multiset of `size` permutations from the table, keeping
/// the per-candidate cost vector incrementally, and checks the aggregator.
class ExhaustiveKemeny {
 public:
  ExhaustiveKemeny(const PermTable& t, std::size_t size) : t_(t), size_(size) {}

  std::size_t run(std::string& failure) {
    cost_.assign(t_.perms.size(), 0);
    picked_.clear();
    failure_ = &failure;
    recurse(0);
    return checked_;
  }

 private:
  void recurse(std::size_t from) {
    if (!failure_->empty()) return;
    if (picked_.size() == size_) {
      check();
      return;
    }
    for (std::size_t p = from; p < t_.perms.size(); ++p) {
      picked_.push_back(p);
      for (std::size_t c = 0; c < cost_.size(); ++c) cost_[c] += t_.dist[p][c];
      recurse(p);
      for (std::size_t c = 0; c < cost_.size(); ++c) cost_[c] -= t_.dist[p][c];
      picked_.pop_back();
    }
  }

  void check() {
    ++checked_;
    // First minimum in lexicographic order.
    std::size_t best = 0;
    for (std::size_t c = 1; c < cost_.size(); ++c) {
      if (cost_[c] < cost_[best]) best = c;
    }
    std::vector<Ranking> samples;
    for (auto p : picked_) samples.emplace_back(t_.perms[p]);
    const auto got = kemeny_aggregate(samples);
    if (got.order() != t_.perms[best]) {
      std::ostringstream os;
      os << "mismatch on multiset of " << samples.size() << " over " << t_.perms[0].size()
         << " items: got " << to_string(got);
      *failure_ = os.str();
    }
  }

  const PermTable& t_;
  std::size_t size_;
  std::vector<std::uint64_t> cost_;
  std::vector<std::size_t> picked_;
  std::string* failure_ = nullptr;
  std::size_t checked_ = 0;
};

Outcome kemeny_exhaustive() {
  std::size_t checked = 0;
  std::string failure;
  // Every multiset for |L| <= 3 up to N = 7 and for |L| = 4 up to N = 5.
  for (std::size_t n = 1; n <= 4; ++n) {
    const PermTable table(n);
    const std::size_t max_samples = n <= 3 ? 7 : 5;
    for (std::size_t size = 1; size <= max_samples; ++size) {
      checked += ExhaustiveKemeny(table, size).run(failure);
      if (!failure.empty()) return {false, failure};
    }
  }
  // Random multisets across the full range |L| <= 4, N <= 7.
  std::mt19937_64 rng(20260101);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 4;
    const std::size_t size = 1 + rng() % 7;
    std::vector<oracle::Order> orders;
    std::vector<Ranking> samples;
    for (std::size_t k = 0; k < size; ++k) {
      oracle::Order o(n);
      std::iota(o.begin(), o.end(), 0);
      std::shuffle(o.begin(), o.end(), rng);
      orders.push_back(o);
      samples.emplace_back(o);
    }
    const auto expected = oracle::kemeny(orders, n);
    if (kemeny_aggregate(samples).order() != expected ||
        kemeny_aggregate_serial(samples).order() != expected) {
      return {false, "random case " + std::to_string(t) + " disagrees with the brute-force minimiser"};
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " multisets, zero mismatches"};
}

Outcome kendall_properties() {
  std::mt19937_64 rng(7);
  auto random_order = [&](std::size_t n) {
    oracle::Order o(n);
    std::iota(o.begin(), o.end(), 0);
    std::shuffle(o.begin(), o.end(), rng);
    return o;
  };
  std::size_t violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng() % 6;
    const auto a = random_order(n), b = random_order(n), c = random_order(n);
    const Ranking ra(a), rb(b), rc(c);
    const auto ab = kendall_distance(ra, rb);
    if (ab != oracle::discordant_pairs(a, b)) ++violations;
    if (ab != kendall_distance(rb, ra)) ++violations;
    if (kendall_distance(ra, ra) != 0) ++violations;
    if ((ab == 0) != (a == b)) ++violations;
    if (kendall_distance(ra, rc) > ab + kendall_distance(rb, rc)) ++violations;
    if (ab > n * (n - 1) / 2) ++violations;
  }
  return {violations == 0, "10000 triples, " + std::to_string(violations) + " violations"};
}

Outcome formula_fixtures() {
  std::vector<std::string> bad;
  auto near = [&](double got, double want, const std::string& what) {
    if (std::abs(got - want) > 1e-12) bad.push_back(what + "=" + std::to_string(got));
  };
  // Subject ranked 1st then 2nd over two questions.
  const std::vector<Ranking> two{Ranking({0, 1, 2}), Ranking({1, 0, 2})};
  near(mrr(two, 0).value, 0.75, "mrr");
  // All MRRs 1.0 with the subject in the pool.
  std::map<std::size_t, MrrValue> ones{{0, {1.0, 1}}, {1, {1.0, 1}}, {2, {1.0, 1}}};
  near(weighted_score(ones, 1, 0.8, 3), 2.8, "weighted");
  // The self branch carries alpha_self, every other evaluator weight 1.
  near(alpha_weight(2, 2, 0.8), 0.8, "alpha(self)");
  near(alpha_weight(2, 0, 0.8), 1.0, "alpha(other)");
  std::map<std::size_t, MrrValue> self_only{{0, {0.0, 1}}, {1, {0.5, 1}}, {2, {0.0, 1}}};
  near(weighted_score(self_only, 1, 0.8, 3), 0.4, "self-branch");
  return {bad.empty(), bad.empty() ? "0.75, 2.8, 0.8 branch exact" : bad.front()};
}

Outcome shuffle_convergence() {
  constexpr std::size_t kItems = 3, kSamples = 5, kTrials = 500;
  constexpr double kNoise = 0.2;
  std::size_t recovered = 0;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    const auto id = "trial-" + std::to_string(trial);
    // Hidden quality order of the models.
    const Ranking truth(seeded_permutation(kItems, ShuffleKey{id, 0, "", "truth", 0, 0}, 11));
    std::vector<Ranking> samples;
    for (std::size_t n = 1; n <= kSamples; ++n) {
      const ShuffleKey key{id, 1, "evaluator", "convergence", static_cast<std::int64_t>(n), 0};
      const auto presentation = seeded_permutation(kItems, key, 11);
      // The evaluator orders what it is shown by true quality, then each
      // adjacent pair is swapped with probability kNoise.
      auto order = truth.order();
      DeterministicRng rng(stable_seed(12, key));
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        if (rng.uniform() < kNoise) std::swap(order[i], order[i + 1]);
      }
      // Written back as ranks over presented positions and parsed like a reply.
      std::vector<std::size_t> rank_of_position(kItems);
      for (std::size_t r = 0; r < order.size(); ++r) {
        const auto pos = std::find(presentation.begin(), presentation.end(), order[r]) -
                         presentation.begin();
        rank_of_position[static_cast<std::size_t>(pos)] = r + 1;
      }
      std::string reply = "Ranking: [";
      for (std::size_t k = 0; k < kItems; ++k) {
        reply += (k ? ", " : "") + std::to_string(rank_of_position[k]);
      }
      reply += "]";
      samples.push_back(parse_ranking(reply, kItems, presentation));
    }
    if (kemeny_aggregate(samples) == truth) ++recovered;
  }
  const double rate = static_cast<double>(recovered) / kTrials;

  // Seed-free check: the exact recovery probability, summing over every
  // combination of swap decisions across the N samples.
  const std::size_t masks = std::size_t{1} << (kItems - 1);
  std::vector<std::pair<Ranking, double>> outcomes;
  for (std::size_t mask = 0; mask < masks; ++mask) {
    std::vector<std::size_t> order(kItems);
    std::iota(order.begin(), order.end(), 0);
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < kItems; ++i) {
      const bool swap = (mask >> i) & 1;
      p *= swap ? kNoise : 1.0 - kNoise;
      if (swap) std::swap(order[i], order[i + 1]);
    }
    outcomes.emplace_back(Ranking(order), p);
  }
  double exact = 0.0;
  std::vector<std::size_t> pick(kSamples, 0);
  for (bool more = true; more;) {
    std::vector<Ranking> samples;
    double p = 1.0;
    for (auto k : pick) {
      samples.push_back(outcomes[k].first);
      p *= outcomes[k].second;
    }
    if (kemeny_aggregate(samples) == Ranking::identity(kItems)) exact += p;
    more = false;
    for (auto& k : pick) {
      if (++k < outcomes.size()) {
        more = true;
        break;
      }
      k = 0;
    }
  }
  std::ostringstream detail;
  detail << recovered << "/500 trials recover the true order; exact probability " << exact;
  return {rate >= 0.90, detail.str()};
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

Outcome metric_fixtures() {
  using namespace metrics;
  std::vector<std::string> bad;
  const auto same = tokenize("the quick brown fox jumps over the lazy dog");
  for (auto v : {RougeVariant::kRouge1, RougeVariant::kRouge2, RougeVariant::kRougeL}) {
    if (std::abs(rouge(same, same, v).value - 1.0) > 1e-12) bad.push_back("rouge on identical pair");
  }
  const std::vector<TokenSequence> one{same};
  if (std::abs(bleu(one, one) - 1.0) > 1e-12) bad.push_back("bleu on identical pair");
  const double r1 = rouge(tokenize("the cat sat"), tokenize("the cat ran"), RougeVariant::kRouge1).value;
  if (std::abs(r1 - 2.0 / 3.0) > 1e-9) bad.push_back("R-1 fixture " + std::to_string(r1));

  std::mt19937_64 rng(3);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  for (int t = 0; t < 1000; ++t) {
    TokenSequence x(rng() % 15), y(rng() % 15);
    for (auto& w : x) w = vocab[rng() % vocab.size()];
    for (auto& w : y) w = vocab[rng() % vocab.size()];
    for (std::size_t n = 1; n <= 4; ++n) {
      if (ngram_overlap(x, y, n) != oracle::clipped_overlap(x, y, n)) {
        bad.push_back("n-gram count, pair " + std::to_string(t));
      }
    }
    if (lcs_length(x, y) != oracle::lcs(x, y)) bad.push_back("LCS, pair " + std::to_string(t));
  }

  const std::vector<double> constant(20, 0.37);
  if (jackknife_ci(constant).halfwidth != 0.0) bad.push_back("halfwidth on constant scores");
  const std::vector<double> binary{0.0, 1.0};
  // Closed form: the jackknife variance of the mean is s^2 / n.
  const auto ci = jackknife_ci(binary);
  if (std::abs(ci.variance - 0.25) > 1e-12) bad.push_back("{0,1} jackknife variance");
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(2 + rng() % 30);
    for (auto& x : v) x = static_cast<double>(rng() % 1000) / 1000.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double closed = ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size());
    if (std::abs(jackknife_ci(v).variance - closed) > 1e-12) bad.push_back("jackknife closed form");
  }
  return {bad.empty(), bad.empty() ? "identity, R-1 2/3, 1000 oracle pairs, jackknife" : bad.front()};
}

// ---------------------------------------------------------------------------
// End-to-end runs on the planted-truth mock
// ---------------------------------------------------------------------------

struct E2E {
  fs::path dir;
  RunConfig config;
  std::vector<Dialogue> corpus;

  explicit E2E(fs::path work) : dir(std::move(work)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    SyntheticOptions shape;
    shape.dialogues = 100;
    shape.facts = 10;
    shape.seed = 1;
    corpus = synthetic_corpus(shape);
    write_corpus((dir / "corpus.jsonl").string(), corpus);
    SyntheticPool pool;
    pool.names = {"model-a", "model-b", "model-c"};
    pool.coverages = {1.0, 0.5, 0.2};
    pool.answer_accuracy = 1.0;
    pool.evaluator_noise = 0.1;
    auto doc = synthetic_config(pool, "corpus.jsonl", "runs");
    doc["pipeline"] = {{"parallelism", 4}};
    config = parse_config(doc, dir);
  }

  DispatchResult run(const std::string& run_id, std::size_t parallelism, bool replay = false) const {
    DispatchOptions o;
    o.command = "run-all";
    o.config = config;
    o.run_id = run_id;
    o.parallelism = parallelism;
    o.replay = replay;
    // The commands print their tables; keep the suite's output to one line per criterion.
    std::ostringstream sink;
    auto* saved = std::cout.rdbuf(sink.rdbuf());
    auto result = dispatch(o);
    std::cout.rdbuf(saved);
    return result;
  }

  fs::path run_dir(const std::string& run_id) const { return dir / "runs" / run_id; }
  Datastore store(const std::string& run_id) const { return Datastore(dir / "runs", run_id); }
};

Outcome planted_truth(const E2E& e2e) {
  const auto r = e2e.run("primary", 4);
  if (r.exit_status != 0) return {false, "run-all failed: " + r.error};
  const auto selections = from_records<SelectionRecord>(e2e.store("primary").get_artifact(Stage::kStage2).records);
  const auto wins = std::count_if(selections.begin(), selections.end(),
                                  [](const auto& s) { return s.best_summarizer == "model-a"; });
  const auto meta = e2e.store("primary").get_sidecar("finetune.meta.json");
  const auto target = meta.at("target_model").get<std::string>();
  return {wins >= 95 && target == "model-a",
          std::to_string(wins) + "/100 dialogues select the full-coverage summary, fine-tune target " +
              target + ", " + std::to_string(r.backend_calls) + " mock calls"};
}

std::vector<std::string> stage_files(const fs::path& run) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(run)) {
    if (e.path().extension() == ".jsonl") files.push_back(e.path().filename().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism_and_replay(const E2E& e2e) {
  // Same config and seed, different thread count.
  const auto second = e2e.run("repeat", 1);
  if (second.exit_status != 0) return {false, "second run failed: " + second.error};
  const auto files = stage_files(e2e.run_dir("primary"));
  if (files != stage_files(e2e.run_dir("repeat"))) return {false, "artifact sets differ"};
  for (const auto& f : files) {
    if (read_file(e2e.run_dir("primary") / f) != read_file(e2e.run_dir("repeat") / f)) {
      return {false, f + " differs between identical runs"};
    }
  }

  fs::create_directories(e2e.run_dir("replay"));
  fs::copy(e2e.run_dir("primary") / "exchanges", e2e.run_dir("replay") / "exchanges",
           fs::copy_options::recursive);
  const auto replay = e2e.run("replay", 4, true);
  if (replay.exit_status != 0) return {false, "replay failed: " + replay.error};
  if (replay.backend_calls != 0) {
    return {false, "replay issued " + std::to_string(replay.backend_calls) + " backend calls"};
  }
  const auto a = e2e.store("primary").get_artifact(Stage::kStage2).records;
  const auto b = e2e.store("replay").get_artifact(Stage::kStage2).records;
  if (a != b) return {false, "replayed selection records differ"};
  return {true, std::to_string(files.size()) + " artifacts byte-identical; replay: 0 backend calls, " +
                    std::to_string(b.size()) + " selection records identical"};
}

Outcome export_contract(const E2E& e2e) {
  const auto store = e2e.store("primary");
  const auto records = from_records<FinetuneRecord>(store.get_artifact(Stage::kFinetune).records);
  const auto selections = from_records<SelectionRecord>(store.get_artifact(Stage::kStage2).records);
  if (records.size() != e2e.corpus.size()) {
    return {false, std::to_string(records.size()) + " records for " +
                       std::to_string(e2e.corpus.size()) + " dialogues"};
  }
  std::map<std::string, std::string> selected;
  for (const auto& s : selections) selected[s.dialogue_id] = s.summary;
  for (const auto& r : records) {
    const auto id = r.meta.at("dialogue_id").get<std::string>();
    if (selected.at(id) != r.output) return {false, "output differs from selection for " + id};
  }
  const auto hp = store.get_sidecar("finetune.meta.json").at("hyperparameters");
  const bool complete = hp.at("epochs") == 3 && hp.at("rank") == 8 && hp.at("alpha") == 16 &&
                        hp.at("learning_rate") == 5e-5 && hp.at("optimizer") == "adamw" &&
                        hp.at("lr_scheduler") == "linear";
  return {complete, complete ? "100 records, outputs byte-equal, LoRA hyperparameters present"
                             : "hyperparameters incomplete: " + hp.dump()};
}

Outcome report_shape(const E2E& e2e) {
  const auto rows = e2e.store("primary").get_artifact(Stage::kMetrics).records;
  std::vector<std::string> systems;
  for (const auto& r : rows) systems.push_back(r.at("system").get<std::string>());
  const std::vector<std::string> want{"model-a", "model-b", "model-c", "Best Selected"};
  return {systems == want, "rows: " + nlohmann::json(systems).dump()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tods acceptance suite"};
  std::string work = (fs::temp_directory_path() / "tods_acceptance").string();
  app.add_option("--work-dir", work, "Scratch directory for end-to-end runs");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::err);

  std::unique_ptr<E2E> e2e;
  auto with_e2e = [&](Outcome (*fn)(const E2E&)) {
    return [&, fn]() -> Outcome {
      if (!e2e) e2e = std::make_unique<E2E>(work);
      return fn(*e2e);
    };
  };

  const std::vector<Criterion> criteria{
      {"kemeny-vs-brute-force", 10.0, kemeny_exhaustive},
      {"kendall-metric-properties", 0.0, kendall_properties},
      {"mrr-weighted-score-fixtures", 0.0, formula_fixtures},
      {"shuffle-aggregation-convergence", 30.0, shuffle_convergence},
      {"metrics-fixtures-and-oracles", 0.0, metric_fixtures},
      {"planted-truth-end-to-end", 120.0, with_e2e(planted_truth)},
      {"determinism-and-replay", 0.0, with_e2e(determinism_and_replay)},
      {"export-contract", 0.0, with_e2e(export_contract)},
      {"live-run-report-shape", 0.0, with_e2e(report_shape)},
      {"published-absolute-scores", 0.0,
       [] {
         return Outcome{false,
                        "depends on 7B-9B models plus GPU fine-tuning on licensed corpora; "
                        "not reproducible offline"};
       },
       false},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
      outcome.pass = false;
      outcome.detail += "; over the " + seconds(c.time_limit_s) + " budget";
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << " (" << outcome.detail << "; "
              << seconds(elapsed) << ")" << (c.attainable ? "" : " [unattainable offline]")
              << std::endl;
    if (!outcome.pass && c.attainable) ++failed;
  }
  std::cout << (failed == 0 ? "acceptance: all attainable criteria pass"
                            : "acceptance: " + std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
