// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/nn/parameter_store.hpp"

namespace hetmol::nn {

template <typename Real>
Parameter<Real>& ParameterStore<Real>::add(const std::string& name, Tensor<Real> value, OrderTag tag) {
  if (params_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  Parameter<Real> p;
  p.grad = Tensor<Real>(value.rows(), value.cols());
  p.value = std::move(value);
  p.tag = tag;
  return params_.emplace(name, std::move(p)).first->second;
}

template <typename Real>
Parameter<Real>& ParameterStore<Real>::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return it->second;
}

template <typename Real>
const Parameter<Real>& ParameterStore<Real>::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return it->second;
}

template <typename Real>
Var<Real> ParameterStore<Real>::bind(Tape<Real>& tape, const std::string& name) {
  auto& p = at(name);
  return tape.parameter(p.value, p.grad);
}

template <typename Real>
void ParameterStore<Real>::zero_grad() {
  for (auto& [name, p] : params_) p.grad.fill(Real(0));
}

template <typename Real>
double ParameterStore<Real>::squared_norm() const {
  double s = 0.0;
  for (const auto& [name, p] : params_)
    for (Real v : p.value.values()) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

template <typename Real>
std::size_t ParameterStore<Real>::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

template <typename Real>
std::vector<std::string> ParameterStore<Real>::names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : params_) out.push_back(name);
  return out;
}

template <typename Real>
void ParameterStore<Real>::save(io::Archive& archive, const std::string& prefix) const {
  for (const auto& [name, p] : params_) {
    const auto values = to_f64(p.value);
    archive.put_f64(prefix + name,
                    {static_cast<std::int64_t>(p.value.rows()), static_cast<std::int64_t>(p.value.cols())}, values);
  }
}

template <typename Real>
void ParameterStore<Real>::load(const io::Archive& archive, const std::string& prefix) {
  for (auto& [name, p] : params_) {
    const auto& values = archive.f64(
        prefix + name, {static_cast<std::int64_t>(p.value.rows()), static_cast<std::int64_t>(p.value.cols())});
    p.value = from_f64<Real>(p.value.rows(), p.value.cols(), values);
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace hetmol::nn
