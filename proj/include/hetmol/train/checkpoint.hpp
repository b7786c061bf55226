// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hetmol/featurize/rbf.hpp"
#include "hetmol/graph/composition.hpp"
#include "hetmol/model/hmgnn.hpp"
#include "hetmol/nn/amsgrad.hpp"
#include "hetmol/train/config.hpp"

namespace hetmol::train {

/// Loop position needed to resume bit-exactly.
struct TrainState {
  std::int64_t step = 0;
  std::int64_t epoch = 0;
  std::string rng_state;
  std::vector<std::int64_t> permutation;  // current epoch order of train indices
  std::int64_t cursor = 0;                // next position in permutation
  std::int64_t evals = 0;
  std::int64_t evals_since_best = 0;
  double best_val_mae = std::numeric_limits<double>::infinity();
  std::int64_t best_step = -1;
  double step0_train_mae = std::numeric_limits<double>::quiet_NaN();
  double loss_sum = 0.0;  // training loss accumulated since the last evaluation
  std::int64_t loss_count = 0;
};

inline constexpr const char* kCheckpointKind = "hetmol-checkpoint";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything a checkpoint holds apart from the precision-specific arrays.
struct CheckpointMeta {
  TrainConfig config;
  featurize::FeatureBanks banks;
  graph::CompositionHash vocabulary;
  std::string dataset_hash;
};

template <typename Real>
struct Checkpoint {
  CheckpointMeta meta;
  std::unique_ptr<model::Hmgnn<Real>> model;
  nn::AmsGrad<Real> optimizer;
  TrainState state;
};

template <typename Real>
io::Archive checkpoint_archive(const CheckpointMeta& meta, const model::Hmgnn<Real>& model,
                               const nn::AmsGrad<Real>& optimizer, const TrainState& state);

template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta, const model::Hmgnn<Real>& model,
                     const nn::AmsGrad<Real>& optimizer, const TrainState& state);

/// Reads the config echo, banks, vocabulary and dataset hash only.
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path);

/// Rebuilds the model from the stored config; every array is checked against
/// the expected shape and a mismatch names the array.
template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path);

}  // namespace hetmol::train
