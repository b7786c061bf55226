// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hetmol/nn/tensor.hpp"

namespace hetmol::nn {

template <typename Real>
class Tape;

/// Handle to a value recorded on a Tape.
template <typename Real>
struct Var {
  Tape<Real>* tape = nullptr;
  std::uint32_t id = 0;

  bool valid() const { return tape != nullptr; }
  const Tensor<Real>& value() const { return tape->value(*this); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Linear recording of a forward computation. Nodes are appended in
/// evaluation order, which is a topological order, so backward() is a single
/// reverse sweep. Parameter leaves refer to externally owned value and
/// gradient buffers that must outlive the tape.
template <typename Real>
class Tape {
 public:
  using TensorT = Tensor<Real>;
  using Backward = std::function<void(Tape&, std::uint32_t self)>;

  Tape() = default;
  /// A tape built with grad disabled records values only; nothing on it can
  /// be differentiated. Used for evaluation.
  explicit Tape(bool grad_enabled) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Real> constant(TensorT value) { return push(std::move(value), false, {}); }
  Var<Real> leaf(TensorT value, bool requires_grad = true) {
    return push(std::move(value), requires_grad && grad_enabled_, {});
  }

  /// Gradients flow straight into `grad` (accumulated, never reset here).
  Var<Real> parameter(const TensorT& value, TensorT& grad) {
    if (!value.same_shape(grad)) throw ShapeError("parameter gradient buffer shape mismatch");
    Node n;
    n.external_value = &value;
    n.external_grad = &grad;
    n.needs_grad = grad_enabled_;
    nodes_.push_back(std::move(n));
    return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  /// Appends an op result. `needs_grad` should be true when any input needs
  /// a gradient; `backward` reads grad(self) and accumulates into inputs.
  Var<Real> record(TensorT value, bool needs_grad, Backward backward) {
    return push(std::move(value), needs_grad, needs_grad ? std::move(backward) : Backward{});
  }

  const TensorT& value(Var<Real> v) const { return node(v).value(); }
  const TensorT& value(std::uint32_t id) const { return nodes_.at(id).value(); }
  bool needs_grad(Var<Real> v) const { return node(v).needs_grad; }
  bool needs_grad(std::uint32_t id) const { return nodes_[id].needs_grad; }

  /// Accumulation buffer for a node, zero-initialised on first use.
  TensorT& grad_buffer(std::uint32_t id) {
    Node& n = nodes_[id];
    if (n.external_grad) return *n.external_grad;
    if (!n.has_grad) {
      const auto& v = n.value();
      n.grad = TensorT(v.rows(), v.cols());
      n.has_grad = true;
    }
    return n.grad;
  }

  /// Gradient of the last backward() with respect to v, or nullptr when
  /// nothing flowed into it.
  const TensorT* grad(Var<Real> v) const {
    const Node& n = node(v);
    if (n.external_grad) return n.external_grad;
    return n.has_grad ? &n.grad : nullptr;
  }

  /// Seeds d(loss)/d(loss) = 1 for every entry of `loss` and sweeps the tape.
  void backward(Var<Real> loss) {
    const Node& root = node(loss);
    if (!root.needs_grad) return;
    grad_buffer(loss.id).fill(Real(1));
    for (std::int64_t i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.needs_grad || !n.backward || !n.has_grad) continue;
      n.backward(*this, static_cast<std::uint32_t>(i));
    }
  }

  std::size_t size() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

 private:
  struct Node {
    TensorT owned;
    const TensorT* external_value = nullptr;
    TensorT grad;
    TensorT* external_grad = nullptr;
    bool has_grad = false;
    bool needs_grad = false;
    Backward backward;

    const TensorT& value() const { return external_value ? *external_value : owned; }
  };

  Var<Real> push(TensorT value, bool needs_grad, Backward backward) {
    Node n;
    n.owned = std::move(value);
    n.needs_grad = needs_grad;
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  const Node& node(Var<Real> v) const {
    if (v.tape != this || v.id >= nodes_.size()) throw TapeError("variable is not recorded on this tape");
    return nodes_[v.id];
  }

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
};

}  // namespace hetmol::nn
