// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "hetmol/train/trainer.hpp"

namespace hetmol::train {

enum class AblationMode { kRemoveMtl, kRemoveIomp, kRemoveHo };

/// "remove_mtl", "remove_iomp" or "remove_ho"; throws ConfigError otherwise.
AblationMode parse_ablation(const std::string& name);
std::string ablation_name(AblationMode mode);

/// The baseline config with one component switched off.
TrainConfig ablated_config(const TrainConfig& baseline, AblationMode mode);

struct AblationReport {
  AblationMode mode;
  EvalReport baseline;
  EvalReport variant;
};

/// Trains the baseline into <out_dir>/default (reusing an existing run with
/// the same config) and the variant into <out_dir>/<mode>, with shared
/// seeds, and evaluates both best checkpoints on the test split (validation
/// split when the test split is empty).
AblationReport run_ablation(AblationMode mode, const TrainConfig& baseline, const LoadedData& data,
                            const TrainOptions& options = {});

}  // namespace hetmol::train
