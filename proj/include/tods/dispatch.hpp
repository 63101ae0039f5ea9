// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tods/config.hpp"

namespace tods {

/// Subcommands in run-all order, followed by pool-sweep and run-all.
const std::vector<std::string>& command_names();

struct DispatchOptions {
  std::string command;
  /// Parsed configuration; takes precedence over config_path.
  std::optional<RunConfig> config;
  std::filesystem::path config_path;
  std::string run_id = "default";
  bool resume = false;
  bool replay = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::size_t> size;  // pool-sweep subset size
  /// Backends by model name, replacing the configured ones (fault injection in tests).
  std::map<std::string, std::shared_ptr<Backend>> backend_overrides;
};

struct DispatchResult {
  int exit_status = 0;
  std::size_t backend_calls = 0;
  std::string error;
};

/// Runs one subcommand. Errors are logged and turned into a nonzero status.
DispatchResult dispatch(const DispatchOptions& options);

/// As dispatch, but errors propagate as exceptions.
std::size_t run_command(const DispatchOptions& options);

}  // namespace tods
