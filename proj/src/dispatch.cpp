// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/dispatch.hpp"

#include <iostream>

#include <spdlog/spdlog.h>

#include "tods/datastore.hpp"
#include "tods/error.hpp"
#include "tods/finetune.hpp"
#include "tods/judge.hpp"
#include "tods/report.hpp"

namespace tods {
namespace {

struct Session {
  RunConfig config;
  Datastore store;
  Gateway gateway;
  Pipeline pipeline;

  Session(RunConfig cfg, const DispatchOptions& options)
      : config(std::move(cfg)),
        store(config.store_root, options.run_id, options.resume),
        gateway(config.gateway_registry(), store.cache(), gateway_options(config, options)),
        pipeline(gateway, config.registry, config.pipeline) {
    std::shared_ptr<Backend> mock;
    std::shared_ptr<Backend> http;
    for (const auto& m : gateway.registry().models()) {
      auto it = options.backend_overrides.find(m.id.name);
      if (it != options.backend_overrides.end()) {
        gateway.set_backend(m.id.name, it->second);
      } else if (m.kind == BackendKind::kMock) {
        if (!mock) mock = std::make_shared<MockBackend>(config.mock);
        gateway.set_backend(m.id.name, mock);
      } else {
        if (!http) http = std::make_shared<HttpBackend>(config.timeout);
        gateway.set_backend(m.id.name, http);
      }
    }
  }

  static GatewayOptions gateway_options(const RunConfig& cfg, const DispatchOptions& options) {
    auto g = cfg.gateway;
    g.replay = options.replay;
    return g;
  }

  template <typename T>
  std::vector<T> require(Stage stage, const std::string& command) {
    if (!store.has_artifact(stage)) {
      throw Error(ErrorKind::kPrecondition,
                  command + " needs the " + stage_name(stage) + " artifact (" + stage_file(stage) +
                      ") in run '" + store.run_id() + "'; run that stage first");
    }
    return from_records<T>(store.get_artifact(stage).records);
  }

  template <typename T>
  void put(Stage stage, const std::vector<T>& items) {
    const auto artifact = store.put_artifact(stage, to_records(items));
    spdlog::info("wrote {} ({} records, sha256 {})", stage_file(stage), items.size(),
                 artifact.digest.substr(0, 12));
  }

  std::vector<Dialogue> corpus() {
    if (store.has_artifact(Stage::kCorpus)) {
      return from_records<Dialogue>(store.get_artifact(Stage::kCorpus).records);
    }
    auto loaded = load_corpus(config.dataset.path, config.dataset.format, config.dataset.task_prompt);
    spdlog::info("corpus: {} dialogues, {:.1f} turns and {:.1f} tokens on average",
                 loaded.stats.dialogues, loaded.stats.avg_turns, loaded.stats.avg_tokens);
    put(Stage::kCorpus, loaded.dialogues);
    return loaded.dialogues;
  }
};

bool has_references(const std::vector<Dialogue>& corpus) {
  return std::all_of(corpus.begin(), corpus.end(),
                     [](const Dialogue& d) { return d.reference.has_value(); });
}

void cmd_generate_summaries(Session& s) {
  s.put(Stage::kSummaries, s.pipeline.generate_summaries(s.corpus()));
}

void cmd_generate_qa(Session& s) { s.put(Stage::kQa, s.pipeline.generate_qa(s.corpus())); }

void cmd_answer(Session& s) {
  const auto summaries = s.require<SummaryCandidate>(Stage::kSummaries, "answer");
  const auto qa = s.require<QaPair>(Stage::kQa, "answer");
  s.put(Stage::kAnswers, s.pipeline.answer_questions(summaries, qa));
}

void cmd_stage1(Session& s) {
  const auto answers = s.require<CandidateAnswer>(Stage::kAnswers, "stage1");
  const auto qa = s.require<QaPair>(Stage::kQa, "stage1");
  s.put(Stage::kStage1, s.pipeline.stage1(answers, qa));
}

void cmd_stage2(Session& s) {
  const auto stage1 = s.require<Stage1Record>(Stage::kStage1, "stage2");
  const auto answers = s.require<CandidateAnswer>(Stage::kAnswers, "stage2");
  const auto qa = s.require<QaPair>(Stage::kQa, "stage2");
  const auto summaries = s.require<SummaryCandidate>(Stage::kSummaries, "stage2");
  s.put(Stage::kStage2, s.pipeline.stage2(stage1, answers, qa, summaries));
}

void cmd_export(Session& s) {
  const auto selections = s.require<SelectionRecord>(Stage::kStage2, "export-finetune");
  const auto corpus = s.corpus();
  const auto choice = select_finetune_model(selections, s.config.registry);
  const auto records = build_finetune_records(selections, corpus);
  s.put(Stage::kFinetune, records);
  s.store.put_sidecar("finetune.meta.json",
                      finetune_metadata(choice, records.size(), s.store.run_id()));
  std::cout << render_win_rates(choice);
}

void cmd_judge(Session& s) {
  const auto corpus = s.corpus();
  const auto summaries = s.require<SummaryCandidate>(Stage::kSummaries, "judge");
  std::map<std::string, std::string> best;
  if (s.store.has_artifact(Stage::kStage2)) {
    for (const auto& r : s.require<SelectionRecord>(Stage::kStage2, "judge")) {
      best[r.dialogue_id] = r.summary;
    }
  }
  std::vector<JudgedSummary> judged;
  for (const auto& d : corpus) {
    for (const auto& sc : summaries) {
      if (sc.dialogue_id == d.id) judged.push_back({d.id, sc.summarizer, sc.text});
    }
    if (auto it = best.find(d.id); it != best.end()) judged.push_back({d.id, "best_selected", it->second});
    if (d.reference) judged.push_back({d.id, "reference", *d.reference});
  }
  const auto scores =
      judge_summaries(s.gateway, s.config.judges(), corpus, judged, s.config.pipeline);
  s.put(Stage::kJudge, scores);
  const auto rows = summarize_judge_scores(scores);
  auto doc = nlohmann::json::array();
  for (const auto& r : rows) doc.push_back(r.to_json());
  s.store.put_sidecar("judge_report.json", doc);
  std::cout << render_judge_table(rows);
}

void cmd_evaluate(Session& s) {
  const auto corpus = s.corpus();
  const auto summaries = s.require<SummaryCandidate>(Stage::kSummaries, "evaluate");
  const auto selections = s.require<SelectionRecord>(Stage::kStage2, "evaluate");
  const auto rows = evaluate_systems(corpus, s.config.registry.names(), summaries, selections);
  std::vector<nlohmann::json> records;
  for (const auto& r : rows) records.push_back(r.to_json());
  s.store.put_artifact(Stage::kMetrics, records);
  std::cout << render_metrics_table(rows);
}

void cmd_pool_sweep(Session& s, std::optional<std::size_t> size) {
  const auto& registry = s.config.registry;
  if (!size || *size < 1 || *size > registry.size()) {
    throw Error(ErrorKind::kUsage, "pool-sweep needs --size between 1 and " +
                                       std::to_string(registry.size()));
  }
  const auto corpus = s.corpus();
  const bool references = has_references(corpus);
  const std::size_t k = *size;
  std::vector<nlohmann::json> records;
  std::vector<metrics::MetricReport> best_reports;

  // Subsets in lexicographic order of registry indices.
  std::vector<bool> mask(registry.size(), false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) indices.push_back(i);
    }
    const auto sub = registry.subset(indices);
    Pipeline p(s.gateway, sub, s.config.pipeline);
    const auto summaries = p.generate_summaries(corpus);
    const auto qa = p.generate_qa(corpus);
    const auto answers = p.answer_questions(summaries, qa);
    const auto stage1 = p.stage1(answers, qa);
    const auto stage2 = p.stage2(stage1, answers, qa, summaries);
    nlohmann::json row = {{"subset", sub.names()},
                          {"selection", select_finetune_model(stage2, sub).to_json()}};
    if (references) {
      auto metrics_rows = nlohmann::json::array();
      for (const auto& r : evaluate_systems(corpus, sub.names(), summaries, stage2)) {
        metrics_rows.push_back(r.to_json());
        if (r.system == kBestSelected) best_reports.push_back(r.report);
      }
      row["metrics"] = metrics_rows;
    }
    records.push_back(std::move(row));
    spdlog::info("pool-sweep: subset {} done", nlohmann::json(sub.names()).dump());
  } while (std::prev_permutation(mask.begin(), mask.end()));

  nlohmann::json aggregate = {{"aggregate", true}, {"size", k}, {"subsets", records.size()}};
  if (references) aggregate["best_selected"] = aggregate_reports(best_reports);
  std::cout << "pool-sweep size " << k << ": " << records.size() << " subsets\n";
  if (references) std::cout << aggregate["best_selected"].dump(2) << "\n";
  records.push_back(std::move(aggregate));
  s.store.put_artifact(Stage::kPoolSweep, records);
}

void cmd_run_all(Session& s) {
  cmd_generate_summaries(s);
  cmd_generate_qa(s);
  cmd_answer(s);
  cmd_stage1(s);
  cmd_stage2(s);
  cmd_export(s);
  cmd_judge(s);
  if (has_references(s.corpus())) {
    cmd_evaluate(s);
  } else {
    spdlog::warn("corpus has no reference summaries; skipping evaluate");
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "generate-summaries", "generate-qa", "answer",     "stage1",     "stage2",
      "export-finetune",    "judge",       "evaluate",   "pool-sweep", "run-all"};
  return names;
}

std::size_t run_command(const DispatchOptions& options) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    throw Error(ErrorKind::kUsage, "unknown subcommand '" + options.command + "'");
  }
  RunConfig cfg = options.config ? *options.config : load_config(options.config_path);
  if (options.seed) cfg.pipeline.global_seed = *options.seed;
  if (options.parallelism) {
    if (*options.parallelism < 1) throw Error(ErrorKind::kConfig, "'--parallelism' must be >= 1");
    cfg.pipeline.parallelism = *options.parallelism;
  }
  Session s(std::move(cfg), options);
  const auto& c = options.command;
  if (c == "generate-summaries") cmd_generate_summaries(s);
  else if (c == "generate-qa") cmd_generate_qa(s);
  else if (c == "answer") cmd_answer(s);
  else if (c == "stage1") cmd_stage1(s);
  else if (c == "stage2") cmd_stage2(s);
  else if (c == "export-finetune") cmd_export(s);
  else if (c == "judge") cmd_judge(s);
  else if (c == "evaluate") cmd_evaluate(s);
  else if (c == "pool-sweep") cmd_pool_sweep(s, options.size);
  else cmd_run_all(s);
  spdlog::info("{}: {} backend calls, {} cache hits", c, s.gateway.backend_calls(),
               s.store.cache().hits());
  return s.gateway.backend_calls();
}

DispatchResult dispatch(const DispatchOptions& options) {
  DispatchResult result;
  try {
    result.backend_calls = run_command(options);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    result.exit_status = 1;
    result.error = e.what();
  }
  return result;
}

}  // namespace tods
