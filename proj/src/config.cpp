// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/config.hpp"

#include <algorithm>
#include <set>

#include "tods/datastore.hpp"
#include "tods/error.hpp"

namespace tods {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& constraint) {
  throw Error(ErrorKind::kConfig, "'" + key + "' " + constraint);
}

const json& object_at(const json& doc, const std::string& key) {
  if (!doc.is_object()) fail(key, "must be an object");
  return doc;
}

void allow_keys(const json& section, const std::string& path,
                std::initializer_list<const char*> allowed) {
  object_at(section, path.empty() ? "<root>" : path);
  for (const auto& [k, _] : section.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      fail(path.empty() ? k : path + "." + k, "is not a recognised key");
    }
  }
}

template <typename T>
T get(const json& section, const std::string& path, const char* key, T fallback) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

template <typename T>
T require(const json& section, const std::string& path, const char* key) {
  if (!section.contains(key)) fail(path + "." + key, "is required");
  return get<T>(section, path, key, T{});
}

ModelEntry parse_model(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "backend", "endpoint", "remote_model"});
  ModelEntry m;
  m.id.name = require<std::string>(j, path, "name");
  const auto backend = get<std::string>(j, path, "backend", "mock");
  if (backend == "mock") {
    m.kind = BackendKind::kMock;
  } else if (backend == "remote") {
    m.kind = BackendKind::kRemote;
    m.endpoint = require<std::string>(j, path, "endpoint");
  } else {
    fail(path + ".backend", "must be \"mock\" or \"remote\"");
  }
  m.remote_model = get<std::string>(j, path, "remote_model", "");
  return m;
}

PromptTemplate parse_template(const json& j, Role role, const std::string& path,
                              const fs::path& base_dir) {
  json doc = j;
  if (j.is_string()) {
    const auto file = base_dir / j.get<std::string>();
    try {
      doc = json::parse(read_file(file));
    } catch (const std::exception& e) {
      fail(path, std::string("could not be read: ") + e.what());
    }
  }
  allow_keys(doc, path, {"role", "instruction", "input"});
  PromptTemplate t;
  t.role = role;
  t.instruction = require<std::string>(doc, path, "instruction");
  t.input = require<std::string>(doc, path, "input");
  if (doc.contains("role") && doc["role"] != std::string(to_string(role))) {
    fail(path + ".role", "must match the section name");
  }
  return t;
}

}  // namespace

ModelRegistry RunConfig::gateway_registry() const {
  auto models = registry.models();
  for (const auto& j : judge_entries) models.push_back(j);
  return ModelRegistry(std::move(models), registry.decoding());
}

ModelRegistry RunConfig::judges() const {
  if (judge_names.empty()) return registry;
  const auto all = gateway_registry();
  std::vector<std::size_t> picked;
  for (const auto& n : judge_names) picked.push_back(all.index_of(n));
  return all.subset(picked);
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  allow_keys(doc, "", {"registry", "judges", "dataset", "templates", "pipeline", "gateway", "store"});
  RunConfig cfg;

  if (!doc.contains("registry")) fail("registry", "is required");
  const auto& reg = doc["registry"];
  allow_keys(reg, "registry", {"models", "decoding", "mock"});
  if (!reg.contains("models") || !reg["models"].is_array() || reg["models"].empty()) {
    fail("registry.models", "must be a nonempty list");
  }
  std::vector<ModelEntry> models;
  for (std::size_t i = 0; i < reg["models"].size(); ++i) {
    models.push_back(parse_model(reg["models"][i], "registry.models[" + std::to_string(i) + "]"));
  }
  DecodingDefaults decoding;
  if (reg.contains("decoding")) {
    const auto& d = reg["decoding"];
    allow_keys(d, "registry.decoding",
               {"generation_temperature", "ranking_temperature", "max_output_tokens"});
    decoding.generation_temperature =
        get(d, "registry.decoding", "generation_temperature", decoding.generation_temperature);
    decoding.ranking_temperature =
        get(d, "registry.decoding", "ranking_temperature", decoding.ranking_temperature);
    decoding.max_output_tokens =
        get(d, "registry.decoding", "max_output_tokens", decoding.max_output_tokens);
    if (decoding.generation_temperature < 0 || decoding.ranking_temperature < 0) {
      fail("registry.decoding", "temperatures must be non-negative");
    }
    if (decoding.max_output_tokens < 1) fail("registry.decoding.max_output_tokens", "must be >= 1");
  }
  try {
    cfg.registry = ModelRegistry(models, decoding);
  } catch (const Error& e) {
    fail("registry.models", e.what());
  }
  if (reg.contains("mock")) {
    try {
      cfg.mock = MockScript::from_json(reg["mock"]);
    } catch (const json::exception& e) {
      fail("registry.mock", e.what());
    }
  }

  if (doc.contains("judges")) {
    const auto& judges = doc["judges"];
    if (!judges.is_array()) fail("judges", "must be a list");
    for (std::size_t i = 0; i < judges.size(); ++i) {
      const auto path = "judges[" + std::to_string(i) + "]";
      if (judges[i].is_string()) {
        cfg.judge_names.push_back(judges[i].get<std::string>());
      } else {
        auto m = parse_model(judges[i], path);
        cfg.judge_names.push_back(m.id.name);
        cfg.judge_entries.push_back(std::move(m));
      }
    }
    try {
      cfg.judges();
    } catch (const Error& e) {
      fail("judges", e.what());
    }
  }

  if (!doc.contains("dataset")) fail("dataset", "is required");
  const auto& ds = doc["dataset"];
  allow_keys(ds, "dataset", {"path", "format", "profile", "task_prompt", "qa_include_task_prompt"});
  cfg.dataset.path = base_dir / require<std::string>(ds, "dataset", "path");
  try {
    cfg.dataset.format = corpus_format_from_string(get<std::string>(ds, "dataset", "format", "native"));
  } catch (const Error&) {
    fail("dataset.format", "must be one of native, samsum, dialogsum");
  }
  cfg.dataset.profile = get<std::string>(ds, "dataset", "profile", "samsum");
  try {
    cfg.pipeline.templates = TemplateSet::for_profile(cfg.dataset.profile);
  } catch (const Error&) {
    fail("dataset.profile", "must be one of samsum, dialogsum, mts, simsamu");
  }
  cfg.dataset.task_prompt = get<std::string>(ds, "dataset", "task_prompt",
                                             cfg.pipeline.templates.summary.instruction);
  cfg.pipeline.templates.qa_include_task_prompt = get<bool>(
      ds, "dataset", "qa_include_task_prompt", cfg.pipeline.templates.qa_include_task_prompt);

  if (doc.contains("templates")) {
    const auto& t = doc["templates"];
    allow_keys(t, "templates",
               {"summary", "qa_generation", "answer", "rank", "judge-coherence",
                "judge-consistency", "judge-fluency", "judge-relevance"});
    for (const auto& [key, value] : t.items()) {
      const auto role = role_from_string(key);
      auto tpl = parse_template(value, role, "templates." + key, base_dir);
      auto& set = cfg.pipeline.templates;
      switch (role) {
        case Role::kSummary: set.summary = tpl; break;
        case Role::kQaGeneration: set.qa = tpl; break;
        case Role::kAnswer: set.answer = tpl; break;
        case Role::kRank: set.rank = tpl; break;
        default: set.judge[role] = tpl; break;
      }
    }
  }

  if (doc.contains("pipeline")) {
    const auto& p = doc["pipeline"];
    allow_keys(p, "pipeline", {"N", "alpha_self", "global_seed", "parallelism", "max_parse_retries"});
    const auto n = get<std::int64_t>(p, "pipeline", "N", 5);
    if (n < 1) fail("pipeline.N", "must be >= 1");
    cfg.pipeline.samples = static_cast<std::size_t>(n);
    cfg.pipeline.alpha_self = get<double>(p, "pipeline", "alpha_self", 0.8);
    if (!(cfg.pipeline.alpha_self > 0.0 && cfg.pipeline.alpha_self <= 1.0)) {
      fail("pipeline.alpha_self", "must satisfy 0 < alpha_self <= 1");
    }
    cfg.pipeline.global_seed = get<std::uint64_t>(p, "pipeline", "global_seed", 0);
    const auto par = get<std::int64_t>(p, "pipeline", "parallelism", 1);
    if (par < 1) fail("pipeline.parallelism", "must be >= 1");
    cfg.pipeline.parallelism = static_cast<std::size_t>(par);
    cfg.pipeline.max_parse_retries = get<int>(p, "pipeline", "max_parse_retries", 3);
    if (cfg.pipeline.max_parse_retries < 0) fail("pipeline.max_parse_retries", "must be >= 0");
  }

  if (doc.contains("gateway")) {
    const auto& g = doc["gateway"];
    allow_keys(g, "gateway", {"max_retries", "backoff_ms", "max_in_flight", "timeout_s"});
    cfg.gateway.max_retries = get<int>(g, "gateway", "max_retries", 4);
    if (cfg.gateway.max_retries < 0) fail("gateway.max_retries", "must be >= 0");
    const auto backoff = get<std::int64_t>(g, "gateway", "backoff_ms", 200);
    if (backoff < 0) fail("gateway.backoff_ms", "must be >= 0");
    cfg.gateway.backoff = std::chrono::milliseconds(backoff);
    const auto in_flight = get<std::int64_t>(g, "gateway", "max_in_flight", 4);
    if (in_flight < 1) fail("gateway.max_in_flight", "must be >= 1");
    cfg.gateway.max_in_flight = static_cast<std::size_t>(in_flight);
    const auto timeout = get<std::int64_t>(g, "gateway", "timeout_s", 120);
    if (timeout < 1) fail("gateway.timeout_s", "must be >= 1");
    cfg.timeout = std::chrono::seconds(timeout);
  }

  if (doc.contains("store")) {
    const auto& s = doc["store"];
    allow_keys(s, "store", {"root"});
    cfg.store_root = base_dir / get<std::string>(s, "store", "root", "runs");
  } else {
    cfg.store_root = base_dir / "runs";
  }

  const auto served = cfg.gateway_registry();
  const bool any_mock = std::any_of(served.models().begin(), served.models().end(),
                                    [](const ModelEntry& m) { return m.kind == BackendKind::kMock; });
  if (any_mock && cfg.mock.empty()) {
    fail("registry.mock", "is required when any model uses the mock backend");
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace tods
