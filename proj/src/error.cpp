// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#include "tods/error.hpp"

namespace tods {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUnsupportedPoolSize: return "unsupported-pool-size";
    case ErrorKind::kIncompleteTable: return "incomplete-table";
    case ErrorKind::kInsufficientSample: return "insufficient-sample";
    case ErrorKind::kUndefinedKappa: return "undefined-kappa";
    case ErrorKind::kTemplateBinding: return "template-binding";
    case ErrorKind::kBackendUnavailable: return "backend-unavailable";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kParseFailure: return "parse-failure";
    case ErrorKind::kMockGap: return "mock-gap";
    case ErrorKind::kReplayIncomplete: return "replay-incomplete";
    case ErrorKind::kCorruption: return "corruption";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kAlreadyFinalized: return "already-finalized";
    case ErrorKind::kMalformedRecord: return "malformed-record";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kStage: return "stage";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace tods
