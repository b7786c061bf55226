// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hetmol/common/archive.hpp"
#include "hetmol/nn/parameter_store.hpp"

namespace hetmol::nn {

struct AmsGradOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with the running elementwise maximum of the second moment in the
/// denominator. Bias correction follows the common formulation:
///   p -= lr / (1 - b1^t) * m / (sqrt(vmax / (1 - b2^t)) + eps).
template <typename Real>
class AmsGrad {
 public:
  struct Slot {
    Tensor<Real> m;
    Tensor<Real> v;
    Tensor<Real> v_max;
  };

  explicit AmsGrad(AmsGradOptions options = {}) : options_(options) {}

  /// Applies one update to every parameter using its accumulated gradient.
  void step(ParameterStore<Real>& params, double lr);

  std::int64_t steps() const { return t_; }
  const AmsGradOptions& options() const { return options_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }

  void save(io::Archive& archive, const std::string& prefix) const;
  /// Restores state for the parameters of `params`; shapes must agree.
  void load(const io::Archive& archive, const std::string& prefix, const ParameterStore<Real>& params);

 private:
  AmsGradOptions options_;
  std::int64_t t_ = 0;
  std::map<std::string, Slot> slots_;
};

}  // namespace hetmol::nn
