// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetmol/model/hmgnn.hpp"
#include "hetmol/train/dataset.hpp"

namespace hetmol::train {

/// MAE of the fused and per-order predictions plus mean attention weights.
/// Order-2 fields are NaN for a single-order model, and alpha2 is 0.
struct EvalReport {
  std::string split;
  std::int64_t molecules = 0;
  std::int64_t step = 0;
  double mae_fused = 0.0;
  double mae_order1 = 0.0;
  double mae_order2 = 0.0;
  double mean_alpha1 = 0.0;
  double mean_alpha2 = 0.0;
  bool has_order2 = true;
  double wall_seconds = 0.0;
};

/// Predictions for the given molecules in chunks of `batch_size`.
template <typename Real>
model::PredictionValues predict_indices(model::Hmgnn<Real>& model, const TrainingData& data,
                                        std::span<const std::int64_t> indices, std::int64_t batch_size,
                                        model::Mode mode);

/// Throws std::invalid_argument for an empty split.
template <typename Real>
EvalReport evaluate(model::Hmgnn<Real>& model, const TrainingData& data, std::span<const std::int64_t> indices,
                    std::int64_t batch_size, model::Mode mode = model::Mode::kInference,
                    const std::string& split = "val");

/// Report from precomputed predictions and targets.
EvalReport summarize_predictions(const model::PredictionValues& p, std::span<const double> targets);

}  // namespace hetmol::train
