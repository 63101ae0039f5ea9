// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file synthetic.hpp
 * @brief Planted-fact corpora and matching mock configurations for offline
 *        runs of the whole pipeline.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/types.hpp"

namespace tods {

struct SyntheticOptions {
  std::size_t dialogues = 100;
  std::size_t facts = 10;  // planted facts (and so gold questions) per dialogue
  std::uint64_t seed = 0;
  bool with_references = true;
};

/// Dialogues whose turns state facts as "The <key> is <value>."; the
/// reference summary lists every fact.
std::vector<Dialogue> synthetic_corpus(const SyntheticOptions& shape);

struct SyntheticPool {
  std::vector<std::string> names;
  std::vector<double> coverages;  // one per model
  double answer_accuracy = 1.0;
  double evaluator_noise = 0.1;
  std::uint64_t mock_seed = 0;
};

/// Configuration document for a mock pool over `corpus_path` (native format).
nlohmann::json synthetic_config(const SyntheticPool& pool, const std::string& corpus_path,
                                const std::string& store_root);

/// Writes dialogues as a native-format corpus file.
void write_corpus(const std::string& path, const std::vector<Dialogue>& dialogues);

}  // namespace tods
