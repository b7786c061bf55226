// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "hetmol/nn/ops.hpp"
#include "hetmol/nn/parameter_store.hpp"

namespace hetmol::model {

using nn::ParameterStore;
using nn::Tape;
using nn::Tensor;
using nn::Var;

// Building blocks of one order's network. Each reads its parameters from
// `params` under `prefix` (e.g. "order2/layer0/msg_same/").

/// h = phi(W (e_Z || x) + b). `continuous` may be invalid when the order has
/// no continuous node feature, in which case only the embedding is used.
/// Expects "<prefix>embedding", "<prefix>W", "<prefix>b".
template <typename Real>
Var<Real> input_module(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix,
                       std::span<const int> composition, Var<Real> continuous);

/// m_i = sum over edges (j -> i) of (G e_ji) * phi(W h_j + b).
/// Expects "<prefix>G", "<prefix>W", "<prefix>b".
template <typename Real>
Var<Real> message_same_order(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                             std::span<const int> src, std::span<const int> dst, Var<Real> edge_features);

/// m_i = sum over edges (j -> i) of phi(W h_j + b), where h_j lives in the
/// sending order and i in the receiving order with `n_receivers` nodes.
template <typename Real>
Var<Real> message_cross_order(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix,
                              Var<Real> h_sender, std::span<const int> src, std::span<const int> dst,
                              std::size_t n_receivers);

/// h + phi(W (h || m...) + b), followed by two residual dense layers
/// h + phi(W h + b). Expects "<prefix>update/", "<prefix>dense0/",
/// "<prefix>dense1/" groups of W and b.
template <typename Real>
Var<Real> node_update(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                      std::span<const Var<Real>> messages);

/// Per-node s_Z (w h + b) + r_Z, shape (n, 1). Expects "<prefix>w",
/// "<prefix>b", "<prefix>scale", "<prefix>shift".
template <typename Real>
Var<Real> output_module(Tape<Real>& tape, ParameterStore<Real>& params, const std::string& prefix, Var<Real> h,
                        std::span<const int> composition);

/// How the fusion batch norm normalises its input.
template <typename Real>
struct FusionNorm {
  enum class Kind { kBatch, kFixed } kind = Kind::kBatch;
  const Tensor<Real>* mean = nullptr;  // kFixed only
  const Tensor<Real>* var = nullptr;
  double eps = 1e-5;
  nn::BatchMoments<Real>* moments_out = nullptr;  // kBatch only
};

/// Attention weights alpha (molecules, orders) from per-order node states.
/// v = BN(|| sum_i h_{p,i}), z = phi(W v + b), alpha = softmax(LeakyReLU(z A)).
/// Expects "fusion/bn/gamma", "fusion/bn/beta", "fusion/dense/W",
/// "fusion/dense/b", "fusion/attention" (columns a_p).
template <typename Real>
Var<Real> fusion_module(Tape<Real>& tape, ParameterStore<Real>& params, std::span<const Var<Real>> h_per_order,
                        std::span<const std::span<const int>> molecule_of_node, std::size_t n_molecules,
                        const FusionNorm<Real>& norm, double negative_slope);

}  // namespace hetmol::model
