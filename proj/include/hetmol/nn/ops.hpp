// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hetmol/nn/tape.hpp"

namespace hetmol::nn {

// Differentiable operations. Every op records its adjoint on the tape of its
// inputs. Shape mismatches throw ShapeError; index arrays are copied.

template <typename Real>
Var<Real> matmul(Var<Real> a, Var<Real> b);

/// x W + b, with b a (1, out) row broadcast over rows. `bias` may be an
/// invalid Var for no bias.
template <typename Real>
Var<Real> linear(Var<Real> x, Var<Real> weight, Var<Real> bias);

template <typename Real>
Var<Real> add(Var<Real> a, Var<Real> b);

template <typename Real>
Var<Real> sub(Var<Real> a, Var<Real> b);

/// Elementwise product.
template <typename Real>
Var<Real> hadamard(Var<Real> a, Var<Real> b);

template <typename Real>
Var<Real> scale(Var<Real> a, double factor);

/// phi(x) = ln(0.5 e^x + 0.5), evaluated as max(x, 0) + log1p(e^-|x|) - ln 2.
template <typename Real>
Var<Real> shifted_softplus(Var<Real> a);

template <typename Real>
Var<Real> leaky_relu(Var<Real> a, double negative_slope);

/// Softmax across the columns of every row.
template <typename Real>
Var<Real> softmax_rows(Var<Real> a);

/// out[k] = a[index[k]]; also serves as embedding lookup.
template <typename Real>
Var<Real> gather_rows(Var<Real> a, std::span<const int> index);

/// out[s] = sum of rows r with segment[r] == s, accumulated in ascending r.
template <typename Real>
Var<Real> segment_sum(Var<Real> a, std::span<const int> segment, std::size_t n_segments);

/// out[dst[e]] += weight[e] * a[src[e]] over edges e, in ascending e. Same
/// result as segment_sum(hadamard(weight, gather_rows(a, src)), dst, n)
/// without the per-edge intermediates.
template <typename Real>
Var<Real> edge_message(Var<Real> weight, Var<Real> a, std::span<const int> src, std::span<const int> dst,
                       std::size_t n_segments);

template <typename Real>
Var<Real> concat_cols(std::span<const Var<Real>> parts);

template <typename Real>
struct BatchMoments {
  Tensor<Real> mean;
  Tensor<Real> var;  // biased
};

/// Normalises each column with the batch mean and biased variance, then
/// applies gamma and beta. The moments used are written to `moments`.
template <typename Real>
Var<Real> batch_norm_train(Var<Real> x, Var<Real> gamma, Var<Real> beta, double eps, BatchMoments<Real>* moments);

/// gamma * (x - mean) / sqrt(var + eps) + beta with fixed statistics.
template <typename Real>
Var<Real> batch_norm_inference(Var<Real> x, Var<Real> gamma, Var<Real> beta, const Tensor<Real>& mean,
                               const Tensor<Real>& var, double eps);

template <typename Real>
Var<Real> abs(Var<Real> a);

/// (1, 1) sum of all entries.
template <typename Real>
Var<Real> sum(Var<Real> a);

template <typename Real>
Var<Real> mean(Var<Real> a);

/// (1, 1) sum of squared entries.
template <typename Real>
Var<Real> sum_squares(Var<Real> a);

/// (rows, 1) per-row sums.
template <typename Real>
Var<Real> row_sum(Var<Real> a);

}  // namespace hetmol::nn
