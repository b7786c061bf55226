// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "hetmol/common/rng.hpp"
#include "hetmol/nn/tensor.hpp"

namespace hetmol::nn {

/// Random matrix with orthonormal columns (rows >= cols) or orthonormal rows
/// (rows < cols), from the QR factorisation of a Gaussian draw with the sign
/// of R's diagonal folded into Q.
Tensor<double> random_orthogonal(std::size_t rows, std::size_t cols, Rng& rng);

/// random_orthogonal rescaled so that the empirical variance of its entries
/// is exactly 2 / (rows + cols). Throws std::invalid_argument on a zero size.
Tensor<double> glorot_orthogonal(std::size_t rows, std::size_t cols, Rng& rng);

/// Entries uniform on [-sqrt(3), sqrt(3)], i.e. unit variance.
Tensor<double> uniform_embedding(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace hetmol::nn
