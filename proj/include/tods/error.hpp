// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tods {

enum class ErrorKind {
  kInvalidArgument,
  kUnsupportedPoolSize,
  kIncompleteTable,
  kInsufficientSample,
  kUndefinedKappa,
  kTemplateBinding,
  kBackendUnavailable,
  kProtocol,
  kParseFailure,
  kMockGap,
  kReplayIncomplete,
  kCorruption,
  kNotFound,
  kAlreadyFinalized,
  kMalformedRecord,
  kConfig,
  kPrecondition,
  kStage,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries an ErrorKind so callers (and
/// tests) can branch on the category instead of parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tods
