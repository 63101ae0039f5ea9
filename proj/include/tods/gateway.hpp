// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file gateway.hpp
 * @brief Uniform access to the model pool.
 *
 * A Gateway owns one Backend per registry entry, consults the exchange cache
 * before every call, retries transient failures with exponential backoff and
 * records each completed exchange for replay.
 */

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/datastore.hpp"
#include "tods/prompt.hpp"
#include "tods/ranking.hpp"

namespace tods {

enum class BackendKind { kRemote, kMock };

struct DecodingDefaults {
  double generation_temperature = 0.7;
  double ranking_temperature = 0.0;
  int max_output_tokens = 1024;
};

struct ModelEntry {
  ModelId id;
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;      // full chat-completions URL for remote models
  std::string remote_model;  // model name sent on the wire; defaults to id.name

  /// QUARTZ_API_KEY_<NAME>, with the name uppercased and non-alphanumerics as '_'.
  std::string credential_env() const;
};

class ModelRegistry {
 public:
  ModelRegistry() = default;
  /// Validates and assigns indices in list order.
  explicit ModelRegistry(std::vector<ModelEntry> models, DecodingDefaults decoding = {});

  std::size_t size() const noexcept { return models_.size(); }
  const std::vector<ModelEntry>& models() const noexcept { return models_; }
  const ModelEntry& at(std::size_t index) const { return models_.at(index); }
  /// Throws kInvalidArgument for an unknown name.
  const ModelEntry& find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  std::vector<std::string> names() const;
  const DecodingDefaults& decoding() const noexcept { return decoding_; }

  /// Registry restricted to `indices` (ascending), re-indexed from 0.
  ModelRegistry subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<ModelEntry> models_;
  DecodingDefaults decoding_;
};

/// One model request. Stage/dialogue/question/sample/attempt identify the
/// pipeline cell; bindings are kept so the mock backend can act on content.
struct ChatRequest {
  std::string stage;
  std::string dialogue_id;
  std::optional<std::int64_t> question;
  std::optional<std::int64_t> sample;
  std::int64_t attempt = 0;
  Role role = Role::kSummary;
  std::string template_digest;
  RenderedPrompt prompt;
  Bindings bindings;
  double temperature = 0.0;
  int max_tokens = 1024;

  /// OpenAI-compatible body: one user message with instruction and input.
  nlohmann::json wire_body(const std::string& model) const;
};

struct ChatResponse {
  std::string text;
  std::string finish_reason;
  double latency_ms = 0.0;
  nlohmann::json usage;
  int attempts = 1;
  bool from_cache = false;
};

/// Transport to one model. Implementations throw kBackendUnavailable for
/// retryable failures and kProtocol for malformed replies.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse send(const ModelEntry& model, const ChatRequest& request) = 0;
};

struct GatewayOptions {
  int max_retries = 4;  // extra attempts after the first transport failure
  std::chrono::milliseconds backoff{200};
  std::size_t max_in_flight = 4;  // per backend
  bool replay = false;
};

/// Simple counting semaphore with a runtime limit.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit) : available_(limit == 0 ? 1 : limit) {}
  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t available_;
};

class Gateway {
 public:
  Gateway(ModelRegistry registry, ExchangeCache& cache, GatewayOptions options = {});

  /// Backend for a model; must be set for every registry entry before use
  /// unless the gateway runs in replay mode.
  void set_backend(const std::string& model, std::shared_ptr<Backend> backend);

  const ModelRegistry& registry() const noexcept { return registry_; }
  const GatewayOptions& options() const noexcept { return options_; }

  /// Cache lookup, then backend call with retries; the exchange is recorded.
  ChatResponse complete(const ModelEntry& model, const ChatRequest& request);

  CacheKey cache_key(const ModelEntry& model, const ChatRequest& request) const;

  /// Backend invocations (network calls for remote models) since construction.
  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }

 private:
  struct Slot {
    std::shared_ptr<Backend> backend;
    std::unique_ptr<InFlightLimiter> limiter;
  };

  ModelRegistry registry_;
  ExchangeCache& cache_;
  GatewayOptions options_;
  std::map<std::string, Slot> slots_;
  std::atomic<std::size_t> backend_calls_{0};
};

/// OpenAI-compatible chat-completions over HTTP(S).
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::chrono::seconds timeout = std::chrono::seconds(120))
      : timeout_(timeout) {}
  ChatResponse send(const ModelEntry& model, const ChatRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

}  // namespace tods
