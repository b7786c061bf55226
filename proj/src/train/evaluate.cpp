// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hetmol::train {

namespace {

void append(std::vector<double>& to, const std::vector<double>& from) { to.insert(to.end(), from.begin(), from.end()); }

}  // namespace

template <typename Real>
model::PredictionValues predict_indices(model::Hmgnn<Real>& model, const TrainingData& data,
                                        std::span<const std::int64_t> indices, std::int64_t batch_size,
                                        model::Mode mode) {
  model::PredictionValues all;
  const auto chunk = static_cast<std::size_t>(std::max<std::int64_t>(1, batch_size));
  for (std::size_t begin = 0; begin < indices.size(); begin += chunk) {
    const auto part = indices.subspan(begin, std::min(chunk, indices.size() - begin));
    const auto p = model.predict(gather_batch(data, part), mode);
    append(all.fused, p.fused);
    append(all.order1, p.order1);
    append(all.order2, p.order2);
    append(all.alpha1, p.alpha1);
    append(all.alpha2, p.alpha2);
  }
  return all;
}

EvalReport summarize_predictions(const model::PredictionValues& p, std::span<const double> targets) {
  const std::size_t n = targets.size();
  if (n == 0) throw std::invalid_argument("evaluation over an empty split");
  if (p.fused.size() != n) throw std::invalid_argument("prediction and target counts differ");
  EvalReport r;
  r.molecules = static_cast<std::int64_t>(n);
  r.has_order2 = !p.order2.empty();
  double f = 0, o1 = 0, o2 = 0, a1 = 0, a2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    f += std::abs(p.fused[i] - targets[i]);
    o1 += std::abs(p.order1[i] - targets[i]);
    a1 += p.alpha1[i];
    if (r.has_order2) {
      o2 += std::abs(p.order2[i] - targets[i]);
      a2 += p.alpha2[i];
    }
  }
  const double dn = static_cast<double>(n);
  r.mae_fused = f / dn;
  r.mae_order1 = o1 / dn;
  r.mae_order2 = r.has_order2 ? o2 / dn : std::nan("");
  r.mean_alpha1 = a1 / dn;
  r.mean_alpha2 = a2 / dn;
  return r;
}

template <typename Real>
EvalReport evaluate(model::Hmgnn<Real>& model, const TrainingData& data, std::span<const std::int64_t> indices,
                    std::int64_t batch_size, model::Mode mode, const std::string& split) {
  if (indices.empty()) throw std::invalid_argument("evaluation over an empty " + split + " split");
  const auto start = std::chrono::steady_clock::now();
  const auto targets = gather_targets(data, indices);
  const auto p = predict_indices(model, data, indices, batch_size, mode);
  EvalReport r = summarize_predictions(p, targets);
  r.split = split;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

template model::PredictionValues predict_indices(model::Hmgnn<float>&, const TrainingData&,
                                                 std::span<const std::int64_t>, std::int64_t, model::Mode);
template model::PredictionValues predict_indices(model::Hmgnn<double>&, const TrainingData&,
                                                 std::span<const std::int64_t>, std::int64_t, model::Mode);
template EvalReport evaluate(model::Hmgnn<float>&, const TrainingData&, std::span<const std::int64_t>, std::int64_t,
                             model::Mode, const std::string&);
template EvalReport evaluate(model::Hmgnn<double>&, const TrainingData&, std::span<const std::int64_t>, std::int64_t,
                             model::Mode, const std::string&);

}  // namespace hetmol::train
