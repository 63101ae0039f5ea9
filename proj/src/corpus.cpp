// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/corpus.hpp"

#include <fstream>
#include <set>

#include "tods/error.hpp"
#include "tods/metrics.hpp"

namespace tods {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const nlohmann::json& require_field(const nlohmann::json& record, const char* name) {
  if (!record.contains(name) || record[name].is_null()) {
    throw Error(ErrorKind::kMalformedRecord, std::string("missing field '") + name + "'");
  }
  return record[name];
}

std::string fill_header(std::string prompt, const std::optional<std::string>& header) {
  constexpr std::string_view kMarker = "[Header]";
  const auto pos = prompt.find(kMarker);
  if (pos != std::string::npos && header) prompt.replace(pos, kMarker.size(), *header);
  return prompt;
}

std::optional<std::string> optional_string(const nlohmann::json& record, const char* name) {
  if (record.contains(name) && record[name].is_string()) return record[name].get<std::string>();
  return std::nullopt;
}

}  // namespace

CorpusFormat corpus_format_from_string(std::string_view name) {
  if (name == "native") return CorpusFormat::kNative;
  if (name == "samsum" || name == "samsum-style") return CorpusFormat::kSamsum;
  if (name == "dialogsum" || name == "dialogsum-style") return CorpusFormat::kDialogsum;
  throw Error(ErrorKind::kInvalidArgument, "unknown corpus format '" + std::string(name) + "'");
}

std::string_view to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kNative: return "native";
    case CorpusFormat::kSamsum: return "samsum";
    case CorpusFormat::kDialogsum: return "dialogsum";
  }
  return "unknown";
}

std::vector<Turn> split_turns(std::string_view text) {
  std::vector<Turn> turns;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon != std::string::npos && colon > 0 && colon < 64) {
      turns.push_back(Turn{trim(line.substr(0, colon)), trim(line.substr(colon + 1))});
    } else if (!turns.empty()) {
      turns.back().text += " " + line;
    } else {
      turns.push_back(Turn{"", line});
    }
  }
  return turns;
}

CorpusStats corpus_stats(const std::vector<Dialogue>& dialogues) {
  CorpusStats s;
  s.dialogues = dialogues.size();
  if (dialogues.empty()) return s;
  double turns = 0.0, tokens = 0.0;
  for (const auto& d : dialogues) {
    turns += static_cast<double>(d.turns.size());
    for (const auto& t : d.turns) tokens += static_cast<double>(metrics::tokenize(t.text).size());
  }
  s.avg_turns = turns / static_cast<double>(dialogues.size());
  s.avg_tokens = tokens / static_cast<double>(dialogues.size());
  return s;
}

Dialogue parse_corpus_record(const nlohmann::json& record, CorpusFormat format,
                             const std::string& default_task_prompt) {
  if (!record.is_object()) throw Error(ErrorKind::kMalformedRecord, "record is not an object");
  Dialogue d;
  try {
    switch (format) {
      case CorpusFormat::kNative: {
        d.id = require_field(record, "id").get<std::string>();
        for (const auto& t : require_field(record, "turns")) {
          d.turns.push_back(Turn{t.at("speaker").get<std::string>(), t.at("text").get<std::string>()});
        }
        d.task_prompt = require_field(record, "task_prompt").get<std::string>();
        d.header = optional_string(record, "header");
        d.reference = optional_string(record, "reference");
        break;
      }
      case CorpusFormat::kSamsum:
      case CorpusFormat::kDialogsum: {
        if (format == CorpusFormat::kDialogsum && record.contains("fname")) {
          d.id = record["fname"].get<std::string>();
        } else {
          const auto& id = require_field(record, "id");
          d.id = id.is_string() ? id.get<std::string>() : id.dump();
        }
        d.turns = split_turns(require_field(record, "dialogue").get<std::string>());
        d.header = optional_string(record, "header");
        d.reference = optional_string(record, "summary");
        d.task_prompt = optional_string(record, "task_prompt").value_or(default_task_prompt);
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kMalformedRecord, e.what());
  }
  d.task_prompt = fill_header(d.task_prompt, d.header);
  if (d.id.empty()) throw Error(ErrorKind::kMalformedRecord, "empty id");
  if (d.turns.empty()) throw Error(ErrorKind::kMalformedRecord, "dialogue '" + d.id + "' has no turns");
  if (trim(d.task_prompt).empty()) {
    throw Error(ErrorKind::kMalformedRecord, "missing field 'task_prompt'");
  }
  return d;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::string& default_task_prompt) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot read corpus " + path.string());
  Corpus corpus;
  std::set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      auto d = parse_corpus_record(nlohmann::json::parse(line), format, default_task_prompt);
      if (!ids.insert(d.id).second) {
        throw Error(ErrorKind::kMalformedRecord, "duplicate id '" + d.id + "'");
      }
      corpus.dialogues.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kMalformedRecord,
                  path.string() + ":" + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kMalformedRecord,
                  path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  if (corpus.dialogues.empty()) {
    throw Error(ErrorKind::kMalformedRecord, "empty corpus " + path.string());
  }
  corpus.stats = corpus_stats(corpus.dialogues);
  return corpus;
}

}  // namespace tods
