// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include <httplib.h>

#include <chrono>
#include <cstdlib>

#include "tods/error.hpp"
#include "tods/gateway.hpp"

namespace tods {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfig, "endpoint '" + url + "' lacks a scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return Endpoint{url, "/v1/chat/completions"};
  return Endpoint{url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ChatResponse HttpBackend::send(const ModelEntry& model, const ChatRequest& request) {
  const auto endpoint = split_url(model.endpoint);
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  httplib::Headers headers;
  if (const char* key = std::getenv(model.credential_env().c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto started = std::chrono::steady_clock::now();
  auto result = client.Post(endpoint.path, headers, request.wire_body(model.remote_model).dump(),
                            "application/json");
  const double latency =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  if (!result) {
    throw Error(ErrorKind::kBackendUnavailable,
                "transport error: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429 || status == 408 || status >= 500) {
    throw Error(ErrorKind::kBackendUnavailable, "HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw Error(ErrorKind::kProtocol, "HTTP " + std::to_string(status) + ": " +
                                          result->body.substr(0, 200));
  }

  ChatResponse response;
  response.latency_ms = latency;
  try {
    const auto body = nlohmann::json::parse(result->body);
    const auto& choice = body.at("choices").at(0);
    response.text = choice.at("message").at("content").get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      response.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (body.contains("usage")) response.usage = body["usage"];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kProtocol, std::string("malformed completion reply: ") + e.what());
  }
  return response;
}

}  // namespace tods
