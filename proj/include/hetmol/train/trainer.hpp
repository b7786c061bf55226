// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetmol/ingest/split.hpp"
#include "hetmol/train/checkpoint.hpp"
#include "hetmol/train/config.hpp"
#include "hetmol/train/dataset.hpp"
#include "hetmol/train/evaluate.hpp"

namespace hetmol::train {

/// Raised when the loss stops being finite.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::int64_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

/// Run-time controls that are not hyperparameters and so are not part of the
/// config echo.
struct TrainOptions {
  /// Stop (and write last.ckpt) once this many steps are done, as if the
  /// process had been interrupted there.
  std::optional<std::int64_t> stop_at_step;
  /// Continue from <out_dir>/last.ckpt.
  bool resume = false;
  int threads = 1;
  std::function<void(const std::string&)> log;
};

struct TrainResult {
  std::int64_t steps = 0;
  bool early_stopped = false;
  bool interrupted = false;
  double step0_train_mae = 0.0;
  EvalReport best;  // validation report at the best step
  std::vector<EvalReport> history;
  std::filesystem::path last_checkpoint;
  std::filesystem::path best_checkpoint;
  std::filesystem::path metrics;
};

/// Mini-batch AMSGrad training with step-decayed learning rate, validation
/// every eval_every steps, best-checkpoint tracking and early stopping after
/// patience_evals evaluations without a strict improvement of the fused
/// validation MAE. Writes last.ckpt, best.ckpt and metrics.jsonl to
/// config.out_dir. Deterministic given the config seeds.
template <typename Real>
TrainResult train_loop(const TrainConfig& config, const TrainingData& data, const ingest::Split& split,
                       const std::string& dataset_hash, const TrainOptions& options = {});

/// Loaded dataset with its split, feature banks and content hash.
struct LoadedData {
  TrainingData data;
  ingest::Split split;
  std::string dataset_hash;
};

LoadedData load_training_data(const TrainConfig& config, int threads = 1);

/// Loads the dataset named in the config and runs train_loop at the
/// configured precision.
TrainResult run_training(const TrainConfig& config, const TrainOptions& options = {});
TrainResult run_training(const TrainConfig& config, const LoadedData& loaded, const TrainOptions& options = {});

featurize::FeatureBanks banks_for(const TrainConfig& config);

}  // namespace hetmol::train
