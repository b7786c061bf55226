// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace hetmol::train {

template <typename Real>
nn::Var<Real> mtl_loss(nn::Tape<Real>& tape, const model::Prediction<Real>& prediction, nn::Var<Real> targets,
                       nn::ParameterStore<Real>& params, double lambda, bool multi_task) {
  const auto n = static_cast<double>(targets.rows());
  if (n == 0) throw std::invalid_argument("loss over an empty batch");
  nn::Var<Real> err = nn::sum(nn::abs(nn::sub(prediction.fused, targets)));
  double heads = 1.0;
  if (multi_task) {
    err = nn::add(err, nn::sum(nn::abs(nn::sub(prediction.order1, targets))));
    heads += 1.0;
    if (prediction.order2.valid()) {
      err = nn::add(err, nn::sum(nn::abs(nn::sub(prediction.order2, targets))));
      heads += 1.0;
    }
  }
  nn::Var<Real> loss = nn::scale(err, 1.0 / (heads * n));
  if (lambda > 0.0) {
    nn::Var<Real> reg;
    for (const auto& [name, p] : params.entries()) {
      const auto term = nn::sum_squares(params.bind(tape, name));
      reg = reg.valid() ? nn::add(reg, term) : term;
    }
    if (reg.valid()) loss = nn::add(loss, nn::scale(reg, lambda));
  }
  return loss;
}

double lr_at(std::int64_t step, double lr0, double factor, std::int64_t interval) {
  if (step < 0 || interval < 1) throw std::invalid_argument("lr_at needs step >= 0 and interval >= 1");
  return lr0 * std::pow(factor, static_cast<double>(step / interval));
}

template nn::Var<float> mtl_loss(nn::Tape<float>&, const model::Prediction<float>&, nn::Var<float>,
                                 nn::ParameterStore<float>&, double, bool);
template nn::Var<double> mtl_loss(nn::Tape<double>&, const model::Prediction<double>&, nn::Var<double>,
                                  nn::ParameterStore<double>&, double, bool);

}  // namespace hetmol::train
