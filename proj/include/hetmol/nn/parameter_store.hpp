// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetmol/common/archive.hpp"
#include "hetmol/nn/tape.hpp"

namespace hetmol::nn {

/// Which order a parameter belongs to. Fusion parameters are shared.
enum class OrderTag { kShared = 0, kOrder1 = 1, kOrder2 = 2 };

template <typename Real>
struct Parameter {
  Tensor<Real> value;
  Tensor<Real> grad;
  OrderTag tag = OrderTag::kShared;
};

/// Trainable arrays addressed by hierarchical names such as
/// "order2/layer0/msg_same/W". Iteration is in name order, which fixes the
/// order of every reduction over parameters.
template <typename Real>
class ParameterStore {
 public:
  /// Throws std::invalid_argument on a duplicate name.
  Parameter<Real>& add(const std::string& name, Tensor<Real> value, OrderTag tag);

  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  /// Throws std::out_of_range naming the parameter when it is missing.
  Parameter<Real>& at(const std::string& name);
  const Parameter<Real>& at(const std::string& name) const;

  /// Records the parameter on a tape; gradients accumulate into its buffer.
  Var<Real> bind(Tape<Real>& tape, const std::string& name);

  void zero_grad();
  /// Sum of squared entries over every parameter.
  double squared_norm() const;
  std::size_t num_values() const;
  std::vector<std::string> names() const;

  std::map<std::string, Parameter<Real>>& entries() { return params_; }
  const std::map<std::string, Parameter<Real>>& entries() const { return params_; }

  /// Values are always written as f64 under "<prefix><name>".
  void save(io::Archive& archive, const std::string& prefix) const;
  /// Requires every stored parameter to be present with the same shape.
  void load(const io::Archive& archive, const std::string& prefix);

 private:
  std::map<std::string, Parameter<Real>> params_;
};

template <typename Real>
std::vector<double> to_f64(const Tensor<Real>& t) {
  return {t.values().begin(), t.values().end()};
}

template <typename Real>
Tensor<Real> from_f64(std::size_t rows, std::size_t cols, const std::vector<double>& values) {
  return Tensor<Real>(rows, cols, std::vector<Real>(values.begin(), values.end()));
}

}  // namespace hetmol::nn
