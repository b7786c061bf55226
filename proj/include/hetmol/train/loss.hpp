// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "hetmol/model/hmgnn.hpp"

namespace hetmol::train {

/// Batch loss: the mean over molecules of
///   (|y_fused - y| + sum_p |y_p - y|) / (orders + 1)
/// plus lambda * ||theta||^2 over every parameter. With `multi_task` false
/// only the fused error is used.
template <typename Real>
nn::Var<Real> mtl_loss(nn::Tape<Real>& tape, const model::Prediction<Real>& prediction, nn::Var<Real> targets,
                       nn::ParameterStore<Real>& params, double lambda, bool multi_task);

/// lr0 * factor^floor(step / interval).
double lr_at(std::int64_t step, double lr0, double factor, std::int64_t interval);

}  // namespace hetmol::train
