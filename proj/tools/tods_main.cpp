// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

// tods: per-stage pipeline subcommands over a run directory.

#include <CLI11.hpp>
#include <map>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tods/dispatch.hpp"
#include "tods/synthetic.hpp"

namespace {

int synth(const std::string& out_dir, std::size_t dialogues, std::size_t facts,
          std::uint64_t seed, double noise) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto corpus = fs::path(out_dir) / "corpus.jsonl";
  tods::write_corpus(corpus.string(),
                     tods::synthetic_corpus({dialogues, facts, seed, true}));
  tods::SyntheticPool pool;
  pool.names = {"model-a", "model-b", "model-c"};
  pool.coverages = {1.0, 0.5, 0.2};
  pool.evaluator_noise = noise;
  pool.mock_seed = seed;
  const auto cfg = tods::synthetic_config(pool, "corpus.jsonl", "runs");
  tods::atomic_write(fs::path(out_dir) / "config.json", cfg.dump(2) + "\n");
  spdlog::info("wrote {} and {}", corpus.string(), (fs::path(out_dir) / "config.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("tods"));

  CLI::App app{"Task-oriented dialogue summarization pipeline", "tods"};
  app.require_subcommand(1);
  tods::DispatchOptions options;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::size_t size = 0;
  bool verbose = false;

  const std::map<std::string, std::string> blurbs{
      {"generate-summaries", "One summary per dialogue and pool model"},
      {"generate-qa", "Gold question/answer pairs, merged across the pool"},
      {"answer", "Answer every gold question from every summary"},
      {"stage1", "Rank responders per summary; pick the best responder"},
      {"stage2", "Rank summaries through their best responders; pick the best summary"},
      {"export-finetune", "Write instruction-tuning records and the target model"},
      {"judge", "Score summaries on four dimensions with judge models"},
      {"evaluate", "ROUGE and BLEU against reference summaries"},
      {"pool-sweep", "Repeat the selection for every pool subset of --size"},
      {"run-all", "Every stage in order"}};
  for (const auto& name : tods::command_names()) {
    auto* sub = app.add_subcommand(name, blurbs.at(name));
    sub->add_option("--config", options.config_path, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--run-id", options.run_id, "Run directory name under the store root");
    sub->add_flag("--resume", options.resume, "Allow re-running finalized stages");
    sub->add_flag("--replay", options.replay, "Serve every model call from the exchange cache");
    sub->add_option("--seed", seed, "Override pipeline.global_seed");
    sub->add_option("--parallelism", parallelism, "Override pipeline.parallelism")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", verbose, "Debug logging");
    if (name == "pool-sweep") {
      sub->add_option("--size", size, "Subset size")->required()->check(CLI::PositiveNumber);
    }
  }

  std::string synth_dir = "synthetic";
  std::size_t synth_dialogues = 100, synth_facts = 10;
  std::uint64_t synth_seed = 7;
  double synth_noise = 0.1;
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-fact corpus and mock config");
  synth_cmd->add_option("--out", synth_dir, "Output directory");
  synth_cmd->add_option("--dialogues", synth_dialogues);
  synth_cmd->add_option("--facts", synth_facts);
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--noise", synth_noise)->check(CLI::Range(0.0, 1.0));

  // CLI11 reports a stray word as a missing subcommand; name it instead.
  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "unknown subcommand '" << argv[1] << "'\n" << app.help();
    return 2;
  }
  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  auto* chosen = app.get_subcommands().front();
  if (chosen == synth_cmd) {
    try {
      return synth(synth_dir, synth_dialogues, synth_facts, synth_seed, synth_noise);
    } catch (const std::exception& e) {
      spdlog::error("{}", e.what());
      return 1;
    }
  }
  options.command = chosen->get_name();
  if (chosen->count("--seed")) options.seed = seed;
  if (chosen->count("--parallelism")) options.parallelism = parallelism;
  if (options.command == "pool-sweep") options.size = size;
  return tods::dispatch(options).exit_status;
}
