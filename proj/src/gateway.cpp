// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/gateway.hpp"

#include <cctype>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "tods/digest.hpp"
#include "tods/error.hpp"

namespace tods {

std::string ModelEntry::credential_env() const {
  std::string name = "QUARTZ_API_KEY_";
  for (unsigned char c : id.name) {
    name.push_back(std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_');
  }
  return name;
}

ModelRegistry::ModelRegistry(std::vector<ModelEntry> models, DecodingDefaults decoding)
    : models_(std::move(models)), decoding_(decoding) {
  if (models_.empty()) throw Error(ErrorKind::kConfig, "model registry is empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    auto& m = models_[i];
    if (m.id.name.empty()) throw Error(ErrorKind::kConfig, "model with empty name");
    if (!seen.insert(m.id.name).second) {
      throw Error(ErrorKind::kConfig, "duplicate model name '" + m.id.name + "'");
    }
    if (m.kind == BackendKind::kRemote && m.endpoint.empty()) {
      throw Error(ErrorKind::kConfig, "remote model '" + m.id.name + "' has no endpoint");
    }
    if (m.remote_model.empty()) m.remote_model = m.id.name;
    m.id.index = i;
  }
}

const ModelEntry& ModelRegistry::find(const std::string& name) const {
  return models_.at(index_of(name));
}

std::size_t ModelRegistry::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (models_[i].id.name == name) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "model '" + name + "' is not in the registry");
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& m : models_) out.push_back(m.id.name);
  return out;
}

ModelRegistry ModelRegistry::subset(const std::vector<std::size_t>& indices) const {
  std::vector<ModelEntry> picked;
  for (auto i : indices) picked.push_back(models_.at(i));
  return ModelRegistry(std::move(picked), decoding_);
}

nlohmann::json ChatRequest::wire_body(const std::string& model) const {
  return {{"model", model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text()}}})},
          {"temperature", temperature},
          {"max_tokens", max_tokens},
          {"stream", false}};
}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    ++available_;
  }
  cv_.notify_one();
}

Gateway::Gateway(ModelRegistry registry, ExchangeCache& cache, GatewayOptions options)
    : registry_(std::move(registry)), cache_(cache), options_(options) {}

void Gateway::set_backend(const std::string& model, std::shared_ptr<Backend> backend) {
  registry_.find(model);
  slots_[model] = Slot{std::move(backend), std::make_unique<InFlightLimiter>(options_.max_in_flight)};
}

CacheKey Gateway::cache_key(const ModelEntry& model, const ChatRequest& request) const {
  CacheKey key;
  key.stage = request.stage;
  key.dialogue_id = request.dialogue_id;
  key.question = request.question;
  key.model = model.id.name;
  key.sample = request.sample;
  key.attempt = request.attempt;
  key.template_digest = request.template_digest;
  key.prompt_digest = sha256_hex(request.prompt.text());
  return key;
}

ChatResponse Gateway::complete(const ModelEntry& model, const ChatRequest& request) {
  const auto key = cache_key(model, request);
  if (auto hit = cache_.lookup(key)) {
    return ChatResponse{hit->text, hit->finish_reason, hit->latency_ms, hit->usage, hit->attempts,
                        true};
  }
  if (options_.replay) cache_.require(key);  // throws kReplayIncomplete

  auto it = slots_.find(model.id.name);
  if (it == slots_.end() || !it->second.backend) {
    throw Error(ErrorKind::kInvalidArgument, "no backend configured for '" + model.id.name + "'");
  }
  auto& slot = it->second;

  slot.limiter->acquire();
  struct Release {
    InFlightLimiter* l;
    ~Release() { l->release(); }
  } release{slot.limiter.get()};

  ChatResponse response;
  std::string last_failure;
  const int total_attempts = options_.max_retries + 1;
  for (int attempt = 1;; ++attempt) {
    try {
      ++backend_calls_;
      response = slot.backend->send(model, request);
      response.attempts = attempt;
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBackendUnavailable) throw;
      last_failure = e.what();
      if (attempt >= total_attempts) {
        throw Error(ErrorKind::kBackendUnavailable,
                    "'" + model.id.name + "' failed after " + std::to_string(attempt) +
                        " attempts; last failure: " + last_failure);
      }
      const auto delay = options_.backoff * (1LL << std::min(attempt - 1, 16));
      spdlog::warn("{}: attempt {} failed ({}), retrying in {} ms", model.id.name, attempt,
                   last_failure, delay.count());
      std::this_thread::sleep_for(delay);
    }
  }

  ExchangeRecord record;
  record.key = key;
  record.request = request.wire_body(model.remote_model);
  record.request["role"] = std::string(to_string(request.role));
  record.text = response.text;
  record.finish_reason = response.finish_reason;
  record.latency_ms = response.latency_ms;
  record.usage = response.usage;
  record.attempts = response.attempts;
  cache_.record(record);
  return response;
}

}  // namespace tods
