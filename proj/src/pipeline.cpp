// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

#include "tods/error.hpp"
#include "tods/parsers.hpp"

namespace tods {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
std::vector<std::string> dialogue_order(const std::vector<T>& items) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (seen.insert(item.dialogue_id).second) ids.push_back(item.dialogue_id);
  }
  return ids;
}

std::map<std::string, std::vector<QaPair>> qa_by_dialogue(const std::vector<QaPair>& qa) {
  std::map<std::string, std::vector<QaPair>> out;
  for (const auto& q : qa) out[q.dialogue_id].push_back(q);
  return out;
}

using AnswerKey = std::tuple<std::string, std::size_t, std::string, std::string>;

std::map<AnswerKey, const CandidateAnswer*> index_answers(
    const std::vector<CandidateAnswer>& answers) {
  std::map<AnswerKey, const CandidateAnswer*> out;
  for (const auto& a : answers) {
    out[{a.dialogue_id, a.question_index, a.summarizer, a.responder}] = &a;
  }
  return out;
}

std::string presented_text(const std::map<AnswerKey, const CandidateAnswer*>& index,
                           const AnswerKey& key) {
  auto it = index.find(key);
  if (it == index.end()) {
    throw Error(ErrorKind::kPrecondition,
                "answers artifact lacks (dialogue " + std::get<0>(key) + ", question " +
                    std::to_string(std::get<1>(key)) + ", summarizer " + std::get<2>(key) +
                    ", responder " + std::get<3>(key) + ")");
  }
  return it->second->not_included ? std::string(kNotIncluded) : it->second->text;
}

NamedScoreTable name_table(const ScoreTable& table, const ModelRegistry& pool) {
  NamedScoreTable out;
  out.alpha_self = table.alpha_self;
  for (const auto& [cell, v] : table.entries) {
    out.entries[pool.at(cell.first).id.name][pool.at(cell.second).id.name] = v;
  }
  for (const auto& [subject, total] : table.totals) out.totals[pool.at(subject).id.name] = total;
  return out;
}

std::vector<std::string> order_names(const Ranking& r, const ModelRegistry& pool) {
  std::vector<std::string> out;
  for (auto i : r.order()) out.push_back(pool.at(i).id.name);
  return out;
}

}  // namespace

TemplateSet TemplateSet::for_profile(std::string_view profile) {
  TemplateSet t;
  if (profile == "samsum" || profile == "dialogsum" || profile == "mts" ||
      profile == "simsamu") {
    t.summary = builtin_template("summary_" + std::string(profile));
  } else {
    throw Error(ErrorKind::kConfig, "unknown dataset profile '" + std::string(profile) +
                                        "' (expected samsum, dialogsum, mts or simsamu)");
  }
  // The SimSAMU QA prompt already carries its task framing.
  t.qa = builtin_template(profile == "simsamu" ? "qa_simsamu" : "qa_generic");
  t.qa_include_task_prompt = profile != "simsamu";
  t.answer = builtin_template("answer");
  t.rank = builtin_template("rank");
  for (auto role : {Role::kJudgeCoherence, Role::kJudgeConsistency, Role::kJudgeFluency,
                    Role::kJudgeRelevance}) {
    auto name = std::string(to_string(role));
    std::replace(name.begin(), name.end(), '-', '_');
    t.judge[role] = builtin_template(name);
  }
  return t;
}

std::string TemplateSet::default_task_prompt(std::string_view profile) {
  return for_profile(profile).summary.instruction;
}

std::string normalize_question(std::string_view question) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : question) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

void parallel_for_each_index(std::size_t n, std::size_t parallelism,
                             const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const int threads = static_cast<int>(std::clamp<std::size_t>(parallelism, 1, n));
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ChatResponse complete_prompt(Gateway& gateway, const ModelEntry& model, const PromptCall& call,
                             const PromptTemplate& tpl, const Bindings& available) {
  Bindings bindings;
  for (const auto& name : tpl.placeholders()) {
    auto it = available.find(name);
    if (it != available.end()) bindings.emplace(name, it->second);
  }
  const auto& decoding = gateway.registry().decoding();
  ChatRequest request;
  request.stage = call.stage;
  request.dialogue_id = call.dialogue_id;
  request.question = call.question;
  request.sample = call.sample;
  request.attempt = call.attempt;
  request.role = tpl.role;
  request.template_digest = tpl.digest();
  request.prompt = render_prompt(tpl, bindings);
  request.bindings = std::move(bindings);
  request.temperature = is_scoring_role(tpl.role) ? decoding.ranking_temperature
                                                  : decoding.generation_temperature;
  request.max_tokens = decoding.max_output_tokens;
  return gateway.complete(model, request);
}

Pipeline::Pipeline(Gateway& gateway, ModelRegistry pool, PipelineOptions options)
    : gateway_(gateway), pool_(std::move(pool)), options_(std::move(options)) {
  if (pool_.size() == 0) throw Error(ErrorKind::kInvalidArgument, "empty model pool");
  if (options_.samples == 0) throw Error(ErrorKind::kInvalidArgument, "N must be at least 1");
  if (!(options_.alpha_self > 0.0 && options_.alpha_self <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha_self must lie in (0, 1]");
  }
  for (const auto& m : pool_.models()) gateway_.registry().find(m.id.name);
  if (pool_.size() >= 2) rank_template_ = rank_template_for(options_.templates.rank, pool_.size());
}

std::vector<SummaryCandidate> Pipeline::generate_summaries(const std::vector<Dialogue>& dialogues) {
  const std::size_t m = pool_.size();
  std::vector<SummaryCandidate> out(dialogues.size() * m);
  parallel_for_each_index(dialogues.size(), options_.parallelism, [&](std::size_t i) {
    const auto& d = dialogues[i];
    PromptTemplate tpl{Role::kSummary, d.task_prompt, options_.templates.summary.input};
    Bindings available{{"Conversation", d.serialized()}};
    if (d.header) available["Header"] = *d.header;
    for (std::size_t s = 0; s < m; ++s) {
      const auto& model = pool_.at(s);
      std::string text;
      for (int attempt = 0; attempt <= options_.max_parse_retries && text.empty(); ++attempt) {
        text = trim(complete_prompt(gateway_, model, {"summaries", d.id, {}, {}, attempt}, tpl,
                                    available)
                        .text);
      }
      if (text.empty()) {
        throw Error(ErrorKind::kStage,
                    "summarizer " + model.id.name + " returned no text for dialogue " + d.id);
      }
      out[i * m + s] = SummaryCandidate{d.id, model.id.name, std::move(text)};
    }
  });
  spdlog::info("summaries: {} dialogues x {} models", dialogues.size(), m);
  return out;
}

std::vector<QaPair> Pipeline::generate_qa(const std::vector<Dialogue>& dialogues) {
  std::vector<std::vector<QaPair>> per_dialogue(dialogues.size());
  parallel_for_each_index(dialogues.size(), options_.parallelism, [&](std::size_t i) {
    const auto& d = dialogues[i];
    PromptTemplate tpl = options_.templates.qa;
    if (options_.templates.qa_include_task_prompt) {
      tpl.instruction = d.task_prompt + "\n\n" + tpl.instruction;
    }
    const Bindings available{{"Conversation", d.serialized()}};
    std::set<std::string> seen;
    auto& merged = per_dialogue[i];
    for (const auto& model : pool_.models()) {
      std::vector<ParsedQa> pairs;
      for (int attempt = 0; attempt <= options_.max_parse_retries; ++attempt) {
        const auto reply =
            complete_prompt(gateway_, model, {"qa", d.id, {}, {}, attempt}, tpl, available);
        try {
          pairs = parse_qa_pairs(reply.text);
          break;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kParseFailure) throw;
        }
      }
      if (pairs.empty()) {
        spdlog::warn("qa: {} produced no parseable pairs for dialogue {}", model.id.name, d.id);
      }
      for (auto& p : pairs) {
        if (trim(p.question).empty()) continue;
        if (!seen.insert(normalize_question(p.question)).second) continue;
        merged.push_back(QaPair{d.id, merged.size() + 1, std::move(p.question),
                                std::move(p.answer), model.id.name});
      }
    }
    if (merged.empty()) {
      throw Error(ErrorKind::kStage, "dialogue " + d.id + " has no gold QA pairs");
    }
  });
  std::vector<QaPair> out;
  for (auto& v : per_dialogue) {
    for (auto& q : v) out.push_back(std::move(q));
  }
  spdlog::info("qa: {} pairs over {} dialogues", out.size(), dialogues.size());
  return out;
}

std::vector<CandidateAnswer> Pipeline::answer_questions(
    const std::vector<SummaryCandidate>& summaries, const std::vector<QaPair>& qa) {
  const auto ids = dialogue_order(summaries);
  const auto questions = qa_by_dialogue(qa);
  std::map<std::pair<std::string, std::string>, const SummaryCandidate*> summary_of;
  for (const auto& s : summaries) summary_of[{s.dialogue_id, s.summarizer}] = &s;

  std::vector<std::vector<CandidateAnswer>> per_dialogue(ids.size());
  parallel_for_each_index(ids.size(), options_.parallelism, [&](std::size_t i) {
    const auto& id = ids[i];
    auto qit = questions.find(id);
    if (qit == questions.end()) {
      throw Error(ErrorKind::kPrecondition, "qa artifact has no pairs for dialogue " + id);
    }
    for (const auto& summarizer : pool_.models()) {
      auto sit = summary_of.find({id, summarizer.id.name});
      if (sit == summary_of.end()) {
        throw Error(ErrorKind::kPrecondition,
                    "summaries artifact lacks " + summarizer.id.name + " for dialogue " + id);
      }
      const auto& summary = sit->second->text;
      for (const auto& q : qit->second) {
        const Bindings available{{"Summary", summary}, {"Question", q.question}};
        for (const auto& responder : pool_.models()) {
          // No question index in the key: the index depends on the merged pool,
          // the prompt text does not, so pool-sweep subsets hit the cache.
          const auto reply =
              complete_prompt(gateway_, responder, {"answers/" + summarizer.id.name, id, {}, {}, 0},
                              options_.templates.answer, available);
          auto text = trim(reply.text);
          const bool missing = text.empty() || text.find(kNotIncluded) != std::string::npos;
          per_dialogue[i].push_back(CandidateAnswer{id, q.question_index, summarizer.id.name,
                                                    responder.id.name, std::move(text), missing});
        }
      }
    }
  });
  std::vector<CandidateAnswer> out;
  for (auto& v : per_dialogue) {
    for (auto& a : v) out.push_back(std::move(a));
  }
  spdlog::info("answers: {} candidate answers", out.size());
  return out;
}

CellResult Pipeline::rank_cell(const std::string& stage, const QaPair& question,
                               const ModelEntry& evaluator,
                               const std::vector<std::string>& answers) {
  const std::size_t m = pool_.size();
  if (answers.size() != m) {
    throw Error(ErrorKind::kInvalidArgument, "ranking cell needs one answer per pool model");
  }
  if (m == 1) return CellResult{Ranking::identity(1), options_.samples};

  const std::size_t n_samples = options_.samples;
  std::vector<Ranking> samples;
  for (std::size_t n = 1; n <= n_samples; ++n) {
    for (int attempt = 0; attempt <= options_.max_parse_retries; ++attempt) {
      const ShuffleKey key{question.dialogue_id, static_cast<std::int64_t>(question.question_index),
                           evaluator.id.name,    stage,
                           static_cast<std::int64_t>(n), attempt};
      const auto presentation = seeded_permutation(m, key, options_.global_seed);
      Bindings available{{"Question", question.question},
                         {"Ground Truth Answer", question.answer}};
      for (std::size_t k = 0; k < m; ++k) {
        available["Answer_" + std::to_string(k + 1)] = answers[presentation[k]];
      }
      const auto reply = complete_prompt(
          gateway_, evaluator,
          {stage, question.dialogue_id, static_cast<std::int64_t>(question.question_index),
           static_cast<std::int64_t>(n), attempt},
          rank_template_, available);
      try {
        samples.push_back(parse_ranking(reply.text, m, presentation));
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kParseFailure) throw;
        spdlog::debug("{} {} q{} {} sample {}: {}", stage, question.dialogue_id,
                      question.question_index, evaluator.id.name, n, e.what());
      }
    }
  }
  const std::size_t required = (n_samples + 1) / 2;
  if (samples.size() < required) {
    throw Error(ErrorKind::kStage,
                "cell (" + stage + ", dialogue " + question.dialogue_id + ", question " +
                    std::to_string(question.question_index) + ", evaluator " +
                    evaluator.id.name + ") has " + std::to_string(samples.size()) +
                    " valid ranking samples, needs " + std::to_string(required));
  }
  return CellResult{kemeny_aggregate(samples), samples.size()};
}

std::vector<Stage1Record> Pipeline::stage1(const std::vector<CandidateAnswer>& answers,
                                           const std::vector<QaPair>& qa) {
  const auto ids = dialogue_order(answers);
  const auto questions = qa_by_dialogue(qa);
  const auto index = index_answers(answers);
  const std::size_t m = pool_.size();

  std::vector<std::vector<Stage1Record>> per_dialogue(ids.size());
  parallel_for_each_index(ids.size(), options_.parallelism, [&](std::size_t i) {
    const auto& id = ids[i];
    const auto& qs = questions.at(id);
    for (const auto& summarizer : pool_.models()) {
      const auto stage = "stage1/" + summarizer.id.name;
      Stage1Record record;
      record.dialogue_id = id;
      record.summarizer = summarizer.id.name;
      std::vector<std::vector<Ranking>> rankings(m);
      for (std::size_t e = 0; e < m; ++e) {
        const auto& evaluator = pool_.at(e);
        for (const auto& q : qs) {
          std::vector<std::string> texts;
          for (const auto& responder : pool_.models()) {
            texts.push_back(presented_text(
                index, {id, q.question_index, summarizer.id.name, responder.id.name}));
          }
          auto cell = rank_cell(stage, q, evaluator, texts);
          record.consensus.push_back(CellConsensus{q.question_index, evaluator.id.name,
                                                   order_names(cell.consensus, pool_),
                                                   cell.valid_samples});
          rankings[e].push_back(std::move(cell.consensus));
        }
      }
      const auto table = build_score_table(rankings, options_.alpha_self);
      const auto best = argmax_with_tiebreak(table.totals);
      record.best_responder = pool_.at(best.winner).id.name;
      record.tied = best.tied;
      record.table = name_table(table, pool_);
      per_dialogue[i].push_back(std::move(record));
    }
  });
  std::vector<Stage1Record> out;
  for (auto& v : per_dialogue) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  spdlog::info("stage1: {} (dialogue, summarizer) selections", out.size());
  return out;
}

std::vector<SelectionRecord> Pipeline::stage2(const std::vector<Stage1Record>& stage1,
                                              const std::vector<CandidateAnswer>& answers,
                                              const std::vector<QaPair>& qa,
                                              const std::vector<SummaryCandidate>& summaries) {
  const auto ids = dialogue_order(stage1);
  const auto questions = qa_by_dialogue(qa);
  const auto index = index_answers(answers);
  const std::size_t m = pool_.size();
  std::map<std::pair<std::string, std::string>, std::string> best_responder;
  for (const auto& r : stage1) best_responder[{r.dialogue_id, r.summarizer}] = r.best_responder;
  std::map<std::pair<std::string, std::string>, std::string> summary_text;
  for (const auto& s : summaries) summary_text[{s.dialogue_id, s.summarizer}] = s.text;

  std::vector<SelectionRecord> out(ids.size());
  parallel_for_each_index(ids.size(), options_.parallelism, [&](std::size_t i) {
    const auto& id = ids[i];
    auto& record = out[i];
    record.dialogue_id = id;
    for (const auto& summarizer : pool_.models()) {
      auto it = best_responder.find({id, summarizer.id.name});
      if (it == best_responder.end()) {
        throw Error(ErrorKind::kPrecondition,
                    "stage1 artifact lacks summarizer " + summarizer.id.name + " for dialogue " + id);
      }
      record.best_responders[summarizer.id.name] = it->second;
    }
    std::vector<std::vector<Ranking>> rankings(m);
    for (std::size_t e = 0; e < m; ++e) {
      const auto& evaluator = pool_.at(e);
      for (const auto& q : questions.at(id)) {
        std::vector<std::string> texts;
        for (const auto& summarizer : pool_.models()) {
          texts.push_back(presented_text(index, {id, q.question_index, summarizer.id.name,
                                                 record.best_responders[summarizer.id.name]}));
        }
        auto cell = rank_cell("stage2", q, evaluator, texts);
        record.consensus.push_back(CellConsensus{q.question_index, evaluator.id.name,
                                                 order_names(cell.consensus, pool_),
                                                 cell.valid_samples});
        rankings[e].push_back(std::move(cell.consensus));
      }
    }
    const auto table = build_score_table(rankings, options_.alpha_self);
    const auto best = argmax_with_tiebreak(table.totals);
    record.best_summarizer = pool_.at(best.winner).id.name;
    record.tie_broken = best.tied > 1;
    record.table = name_table(table, pool_);
    auto sit = summary_text.find({id, record.best_summarizer});
    if (sit == summary_text.end()) {
      throw Error(ErrorKind::kPrecondition,
                  "summaries artifact lacks " + record.best_summarizer + " for dialogue " + id);
    }
    record.summary = sit->second;
  });
  spdlog::info("stage2: {} dialogues selected", out.size());
  return out;
}

}  // namespace tods
