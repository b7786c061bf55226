// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/nn/amsgrad.hpp"

#include <algorithm>
#include <cmath>

namespace hetmol::nn {

template <typename Real>
void AmsGrad<Real>::step(ParameterStore<Real>& params, double lr) {
  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2_sqrt = std::sqrt(1.0 - std::pow(b2, static_cast<double>(t_)));
  const double step_size = lr / bc1;
  for (auto& [name, p] : params.entries()) {
    auto [it, inserted] = slots_.try_emplace(name);
    Slot& s = it->second;
    if (inserted) {
      s.m = Tensor<Real>(p.value.rows(), p.value.cols());
      s.v = s.m;
      s.v_max = s.m;
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double m = b1 * s.m[i] + (1.0 - b1) * g;
      const double v = b2 * s.v[i] + (1.0 - b2) * g * g;
      s.m[i] = static_cast<Real>(m);
      s.v[i] = static_cast<Real>(v);
      s.v_max[i] = std::max(s.v_max[i], s.v[i]);
      const double denom = std::sqrt(static_cast<double>(s.v_max[i])) / bc2_sqrt + options_.eps;
      p.value[i] = static_cast<Real>(p.value[i] - step_size * m / denom);
    }
  }
}

template <typename Real>
void AmsGrad<Real>::save(io::Archive& archive, const std::string& prefix) const {
  archive.put_scalar(prefix + "step", t_);
  for (const auto& [name, s] : slots_) {
    const std::vector<std::int64_t> shape{static_cast<std::int64_t>(s.m.rows()),
                                          static_cast<std::int64_t>(s.m.cols())};
    archive.put_f64(prefix + "m/" + name, shape, to_f64(s.m));
    archive.put_f64(prefix + "v/" + name, shape, to_f64(s.v));
    archive.put_f64(prefix + "vmax/" + name, shape, to_f64(s.v_max));
  }
}

template <typename Real>
void AmsGrad<Real>::load(const io::Archive& archive, const std::string& prefix, const ParameterStore<Real>& params) {
  t_ = archive.scalar_i64(prefix + "step");
  slots_.clear();
  if (t_ == 0) return;
  for (const auto& [name, p] : params.entries()) {
    const auto r = p.value.rows();
    const auto c = p.value.cols();
    const std::vector<std::int64_t> shape{static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)};
    Slot s;
    s.m = from_f64<Real>(r, c, archive.f64(prefix + "m/" + name, shape));
    s.v = from_f64<Real>(r, c, archive.f64(prefix + "v/" + name, shape));
    s.v_max = from_f64<Real>(r, c, archive.f64(prefix + "vmax/" + name, shape));
    slots_.emplace(name, std::move(s));
  }
}

template class AmsGrad<float>;
template class AmsGrad<double>;

}  // namespace hetmol::nn
