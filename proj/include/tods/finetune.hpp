// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tods Contributors

/**
 * @file finetune.hpp
 * @brief Win-rate based choice of the model to fine-tune and the training
 *        file export. Training itself runs in an external trainer.
 */

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "tods/gateway.hpp"
#include "tods/types.hpp"

namespace tods {

struct WinRate {
  std::string summarizer;
  std::size_t wins = 0;
  double rate = 0.0;        // wins / dialogues
  double mean_total = 0.0;  // mean stage-2 weighted total over dialogues
};

struct FinetuneChoice {
  std::string model;
  std::vector<WinRate> table;  // registry order

  nlohmann::json to_json() const;
};

/// Most wins; ties go to the higher mean stage-2 total, then registry order.
/// Throws kInvalidArgument on an empty record list.
FinetuneChoice select_finetune_model(const std::vector<SelectionRecord>& records,
                                     const ModelRegistry& pool);

/// LoRA settings handed to the external trainer.
nlohmann::json lora_hyperparameters();

/// One record per corpus dialogue, in corpus order. Throws kPrecondition
/// listing every dialogue without a selection.
std::vector<FinetuneRecord> build_finetune_records(const std::vector<SelectionRecord>& records,
                                                   const std::vector<Dialogue>& corpus);

/// Sidecar metadata describing an export.
nlohmann::json finetune_metadata(const FinetuneChoice& choice, std::size_t record_count,
                                 const std::string& run_id);

}  // namespace tods
