// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/nn/init.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace hetmol::nn {

Tensor<double> random_orthogonal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("orthogonal init needs a non-empty shape");
  const bool tall = rows >= cols;
  const auto m = static_cast<Eigen::Index>(tall ? rows : cols);
  const auto n = static_cast<Eigen::Index>(tall ? cols : rows);
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  Tensor<double> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out(i, j) = tall ? q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                       : q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  return out;
}

Tensor<double> glorot_orthogonal(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor<double> w = random_orthogonal(rows, cols, rng);
  const double target = 2.0 / static_cast<double>(rows + cols);
  const double n = static_cast<double>(w.size());
  double mean = 0.0;
  for (double v : w.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : w.values()) var += (v - mean) * (v - mean);
  var /= n;
  // A single entry has no spread; give it the target magnitude instead.
  const double factor = var > 0.0 ? std::sqrt(target / var) : std::sqrt(target) / std::abs(w[0]);
  for (auto& v : w.values()) v *= factor;
  return w;
}

Tensor<double> uniform_embedding(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor<double> out(rows, cols);
  const double bound = std::sqrt(3.0);
  for (auto& v : out.values()) v = rng.uniform(-bound, bound);
  return out;
}

}  // namespace hetmol::nn
