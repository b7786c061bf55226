// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/model/modules.hpp"

#include <vector>

namespace hetmol::model {

namespace {

template <typename Real>
Var<Real> dense(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> x) {
  return nn::shifted_softplus(nn::linear(x, params.bind(tape, prefix + "W"), params.bind(tape, prefix + "b")));
}

}  // namespace

template <typename Real>
Var<Real> input_module(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix,
                       std::span<const int> composition, Var<Real> continuous) {
  const auto& table = params.at(prefix + "embedding").value;
  for (int z : composition)
    if (z < 0 || static_cast<std::size_t>(z) >= table.rows())
      throw std::out_of_range("composition id " + std::to_string(z) + " outside the " + prefix +
                              "embedding table of " + std::to_string(table.rows()) + " rows");
  Var<Real> x = nn::gather_rows(params.bind(tape, prefix + "embedding"), composition);
  if (continuous.valid()) {
    const Var<Real> parts[] = {x, continuous};
    x = nn::concat_cols<Real>(parts);
  }
  return dense(tape, params, prefix, x);
}

template <typename Real>
Var<Real> message_same_order(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                             std::span<const int> src, std::span<const int> dst, Var<Real> edge_features) {
  const Var<Real> node_msg = dense(tape, params, prefix, h);
  const Var<Real> filter = nn::matmul(edge_features, params.bind(tape, prefix + "G"));
  return nn::edge_message(filter, node_msg, src, dst, h.rows());
}

template <typename Real>
Var<Real> message_cross_order(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix,
                              Var<Real> h_sender, std::span<const int> src, std::span<const int> dst,
                              std::size_t n_receivers) {
  const Var<Real> node_msg = dense(tape, params, prefix, h_sender);
  return nn::segment_sum(nn::gather_rows(node_msg, src), dst, n_receivers);
}

template <typename Real>
Var<Real> node_update(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                      std::span<const Var<Real>> messages) {
  std::vector<Var<Real>> parts{h};
  parts.insert(parts.end(), messages.begin(), messages.end());
  h = nn::add(h, dense(tape, params, prefix + "update/", nn::concat_cols<Real>(parts)));
  h = nn::add(h, dense(tape, params, prefix + "dense0/", h));
  h = nn::add(h, dense(tape, params, prefix + "dense1/", h));
  return h;
}

template <typename Real>
Var<Real> output_module(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                        std::span<const int> composition) {
  const Var<Real> raw = nn::linear(h, params.bind(tape, prefix + "w"), params.bind(tape, prefix + "b"));
  const Var<Real> s = nn::gather_rows(params.bind(tape, prefix + "scale"), composition);
  const Var<Real> r = nn::gather_rows(params.bind(tape, prefix + "shift"), composition);
  return nn::add(nn::hadamard(s, raw), r);
}

template <typename Real>
Var<Real> fusion_module(Tape<Real>& tape, ParameterStore<Real>& params, std::span<const Var<Real>> h_per_order,
                        std::span<const std::span<const int>> molecule_of_node, std::size_t n_molecules,
                        const FusionNorm<Real>& norm, double negative_slope) {
  std::vector<Var<Real>> pooled;
  for (std::size_t p = 0; p < h_per_order.size(); ++p)
    pooled.push_back(nn::segment_sum(h_per_order[p], molecule_of_node[p], n_molecules));
  const Var<Real> v_raw = nn::concat_cols<Real>(pooled);
  const Var<Real> gamma = params.bind(tape, "fusion/bn/gamma");
  const Var<Real> beta = params.bind(tape, "fusion/bn/beta");
  const Var<Real> v = norm.kind == FusionNorm<Real>::Kind::kBatch
                          ? nn::batch_norm_train(v_raw, gamma, beta, norm.eps, norm.moments_out)
                          : nn::batch_norm_inference(v_raw, gamma, beta, *norm.mean, *norm.var, norm.eps);
  const Var<Real> z = dense(tape, params, "fusion/dense/", v);
  const Var<Real> logits = nn::leaky_relu(nn::matmul(z, params.bind(tape, "fusion/attention")), negative_slope);
  return nn::softmax_rows(logits);
}

#define HETMOL_INSTANTIATE_MODULES(R)                                                                              \
  template Var<R> input_module(Tape<R>&, ParameterStore<R>&, const std::string&, std::span<const int>, Var<R>);    \
  template Var<R> message_same_order(Tape<R>&, ParameterStore<R>&, const std::string&, Var<R>,                     \
                                     std::span<const int>, std::span<const int>, Var<R>);                          \
  template Var<R> message_cross_order(Tape<R>&, ParameterStore<R>&, const std::string&, Var<R>,                    \
                                      std::span<const int>, std::span<const int>, std::size_t);                    \
  template Var<R> node_update(Tape<R>&, ParameterStore<R>&, const std::string&, Var<R>, std::span<const Var<R>>);  \
  template Var<R> output_module(Tape<R>&, ParameterStore<R>&, const std::string&, Var<R>, std::span<const int>);   \
  template Var<R> fusion_module(Tape<R>&, ParameterStore<R>&, std::span<const Var<R>>,                             \
                                std::span<const std::span<const int>>, std::size_t, const FusionNorm<R>&, double);

HETMOL_INSTANTIATE_MODULES(float)
HETMOL_INSTANTIATE_MODULES(double)

}  // namespace hetmol::model
