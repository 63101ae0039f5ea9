// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

#pragma once

#include <string>
#include <string_view>

namespace tods {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace tods
