// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/nn/ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace hetmol::nn {

namespace {

template <typename Real>
using RowMajor = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Real>
Eigen::Map<RowMajor<Real>> as_matrix(Tensor<Real>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

template <typename Real>
Eigen::Map<const RowMajor<Real>> as_matrix(const Tensor<Real>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

template <typename Real>
Tape<Real>& tape_of(Var<Real> a) {
  if (!a.valid()) throw TapeError("operation on an unrecorded variable");
  return *a.tape;
}

template <typename Real>
void same_tape(Var<Real> a, Var<Real> b) {
  if (a.tape != b.tape) throw TapeError("operands are recorded on different tapes");
}

template <typename Real>
void require_same_shape(const char* op, const Tensor<Real>& a, const Tensor<Real>& b) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shapes " + shape_string(a) + " and " + shape_string(b) + " differ");
}

}  // namespace

template <typename Real>
Var<Real> matmul(Var<Real> a, Var<Real> b) {
  auto& t = tape_of(a);
  same_tape(a, b);
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: " + shape_string(av) + " x " + shape_string(bv));
  Tensor<Real> out(av.rows(), bv.cols());
  as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  const auto ia = a.id, ib = b.id;
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b), [ia, ib](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    if (tp.needs_grad(ia)) as_matrix(tp.grad_buffer(ia)).noalias() += as_matrix(gy) * as_matrix(tp.value(ib)).transpose();
    if (tp.needs_grad(ib)) as_matrix(tp.grad_buffer(ib)).noalias() += as_matrix(tp.value(ia)).transpose() * as_matrix(gy);
  });
}

template <typename Real>
Var<Real> linear(Var<Real> x, Var<Real> weight, Var<Real> bias) {
  auto& t = tape_of(x);
  same_tape(x, weight);
  const auto& xv = x.value();
  const auto& wv = weight.value();
  if (xv.cols() != wv.rows()) throw ShapeError("linear: input " + shape_string(xv) + ", weight " + shape_string(wv));
  Tensor<Real> out(xv.rows(), wv.cols());
  auto om = as_matrix(out);
  om.noalias() = as_matrix(xv) * as_matrix(wv);
  const bool has_bias = bias.valid();
  if (has_bias) {
    same_tape(x, bias);
    const auto& bv = bias.value();
    if (bv.rows() != 1 || bv.cols() != wv.cols())
      throw ShapeError("linear: bias " + shape_string(bv) + " for output width " + std::to_string(wv.cols()));
    om.rowwise() += as_matrix(bv).row(0);
  }
  const bool needs = t.needs_grad(x) || t.needs_grad(weight) || (has_bias && t.needs_grad(bias));
  const auto ix = x.id, iw = weight.id, ib = bias.id;
  return t.record(std::move(out), needs, [ix, iw, ib, has_bias](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    if (tp.needs_grad(ix)) as_matrix(tp.grad_buffer(ix)).noalias() += as_matrix(gy) * as_matrix(tp.value(iw)).transpose();
    if (tp.needs_grad(iw)) as_matrix(tp.grad_buffer(iw)).noalias() += as_matrix(tp.value(ix)).transpose() * as_matrix(gy);
    if (has_bias && tp.needs_grad(ib)) as_matrix(tp.grad_buffer(ib)).row(0) += as_matrix(gy).colwise().sum();
  });
}

template <typename Real>
Var<Real> add(Var<Real> a, Var<Real> b) {
  auto& t = tape_of(a);
  same_tape(a, b);
  require_same_shape("add", a.value(), b.value());
  Tensor<Real> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const auto ia = a.id, ib = b.id;
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b), [ia, ib](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    for (auto id : {ia, ib}) {
      if (!tp.needs_grad(id)) continue;
      auto& g = tp.grad_buffer(id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
    }
  });
}

template <typename Real>
Var<Real> sub(Var<Real> a, Var<Real> b) {
  auto& t = tape_of(a);
  same_tape(a, b);
  require_same_shape("sub", a.value(), b.value());
  Tensor<Real> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const auto ia = a.id, ib = b.id;
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b), [ia, ib](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    if (tp.needs_grad(ia)) {
      auto& g = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
    }
    if (tp.needs_grad(ib)) {
      auto& g = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gy[i];
    }
  });
}

template <typename Real>
Var<Real> hadamard(Var<Real> a, Var<Real> b) {
  auto& t = tape_of(a);
  same_tape(a, b);
  require_same_shape("hadamard", a.value(), b.value());
  Tensor<Real> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const auto ia = a.id, ib = b.id;
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b), [ia, ib](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    if (tp.needs_grad(ia)) {
      auto& g = tp.grad_buffer(ia);
      const auto& bv = tp.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * bv[i];
    }
    if (tp.needs_grad(ib)) {
      auto& g = tp.grad_buffer(ib);
      const auto& av = tp.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * av[i];
    }
  });
}

template <typename Real>
Var<Real> scale(Var<Real> a, double factor) {
  auto& t = tape_of(a);
  Tensor<Real> out = a.value();
  const Real f = static_cast<Real>(factor);
  for (auto& v : out.values()) v *= f;
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia, f](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += f * gy[i];
  });
}

template <typename Real>
Var<Real> shifted_softplus(Var<Real> a) {
  auto& t = tape_of(a);
  const auto& av = a.value();
  const bool needs = t.needs_grad(a);
  Tensor<Real> out(av.rows(), av.cols());
  // The derivative is the logistic sigmoid; it falls out of exp(-|x|) for free.
  std::vector<Real> slope(needs ? av.size() : 0);
  const Real ln2 = static_cast<Real>(std::numbers::ln2);
  for (std::size_t i = 0; i < av.size(); ++i) {
    const Real x = av[i];
    const Real e = std::exp(-std::abs(x));
    out[i] = std::max(x, Real(0)) + std::log1p(e) - ln2;
    if (needs) slope[i] = x >= 0 ? Real(1) / (Real(1) + e) : e / (Real(1) + e);
  }
  const auto ia = a.id;
  return t.record(std::move(out), needs, [ia, slope = std::move(slope)](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * slope[i];
  });
}

template <typename Real>
Var<Real> leaky_relu(Var<Real> a, double negative_slope) {
  auto& t = tape_of(a);
  Tensor<Real> out = a.value();
  const Real s = static_cast<Real>(negative_slope);
  for (auto& v : out.values())
    if (v < 0) v *= s;
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia, s](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    const auto& x = tp.value(ia);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += x[i] < 0 ? s * gy[i] : gy[i];
  });
}

template <typename Real>
Var<Real> softmax_rows(Var<Real> a) {
  auto& t = tape_of(a);
  const auto& av = a.value();
  Tensor<Real> out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    Real mx = av(r, 0);
    for (std::size_t c = 1; c < av.cols(); ++c) mx = std::max(mx, av(r, c));
    Real z = 0;
    for (std::size_t c = 0; c < av.cols(); ++c) z += (out(r, c) = std::exp(av(r, c) - mx));
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c) /= z;
  }
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    const auto& y = tp.value(self);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      Real dot = 0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += gy(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) g(r, c) += y(r, c) * (gy(r, c) - dot);
    }
  });
}

template <typename Real>
Var<Real> gather_rows(Var<Real> a, std::span<const int> index) {
  auto& t = tape_of(a);
  const auto& av = a.value();
  const auto cols = av.cols();
  Tensor<Real> out(index.size(), cols);
  for (std::size_t k = 0; k < index.size(); ++k) {
    const int r = index[k];
    if (r < 0 || static_cast<std::size_t>(r) >= av.rows())
      throw std::out_of_range("gather_rows: index " + std::to_string(r) + " outside " + std::to_string(av.rows()) +
                              " rows");
    std::copy_n(av.data() + static_cast<std::size_t>(r) * cols, cols, out.data() + k * cols);
  }
  std::vector<int> idx(index.begin(), index.end());
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia, idx = std::move(idx)](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    auto& g = tp.grad_buffer(ia);
    const auto cols = g.cols();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      Real* dst = g.data() + static_cast<std::size_t>(idx[k]) * cols;
      const Real* src = gy.data() + k * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

template <typename Real>
Var<Real> segment_sum(Var<Real> a, std::span<const int> segment, std::size_t n_segments) {
  auto& t = tape_of(a);
  const auto& av = a.value();
  if (segment.size() != av.rows())
    throw ShapeError("segment_sum: " + std::to_string(segment.size()) + " segment ids for " +
                     std::to_string(av.rows()) + " rows");
  const auto cols = av.cols();
  Tensor<Real> out(n_segments, cols);
  for (std::size_t r = 0; r < segment.size(); ++r) {
    const int s = segment[r];
    if (s < 0 || static_cast<std::size_t>(s) >= n_segments)
      throw std::out_of_range("segment_sum: segment id " + std::to_string(s) + " outside [0, " +
                              std::to_string(n_segments) + ")");
    Real* dst = out.data() + static_cast<std::size_t>(s) * cols;
    const Real* src = av.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
  }
  std::vector<int> seg(segment.begin(), segment.end());
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia, seg = std::move(seg)](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    auto& g = tp.grad_buffer(ia);
    const auto cols = g.cols();
    for (std::size_t r = 0; r < seg.size(); ++r) {
      const Real* src = gy.data() + static_cast<std::size_t>(seg[r]) * cols;
      Real* dst = g.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

template <typename Real>
Var<Real> edge_message(Var<Real> weight, Var<Real> a, std::span<const int> src, std::span<const int> dst,
                       std::size_t n_segments) {
  auto& t = tape_of(a);
  const auto& wv = weight.value();
  const auto& av = a.value();
  if (src.size() != dst.size() || wv.rows() != src.size() || wv.cols() != av.cols())
    throw ShapeError("edge_message: weight " + shape_string(wv) + ", values " + shape_string(av) + ", " +
                     std::to_string(src.size()) + " sources, " + std::to_string(dst.size()) + " targets");
  const auto cols = av.cols();
  Tensor<Real> out(n_segments, cols);
  for (std::size_t e = 0; e < src.size(); ++e) {
    if (src[e] < 0 || static_cast<std::size_t>(src[e]) >= av.rows())
      throw std::out_of_range("edge_message: source " + std::to_string(src[e]) + " outside " +
                              std::to_string(av.rows()) + " rows");
    if (dst[e] < 0 || static_cast<std::size_t>(dst[e]) >= n_segments)
      throw std::out_of_range("edge_message: segment id " + std::to_string(dst[e]) + " outside [0, " +
                              std::to_string(n_segments) + ")");
    Real* o = out.data() + static_cast<std::size_t>(dst[e]) * cols;
    const Real* w = wv.data() + e * cols;
    const Real* x = av.data() + static_cast<std::size_t>(src[e]) * cols;
    for (std::size_t c = 0; c < cols; ++c) o[c] += w[c] * x[c];
  }
  std::vector<int> s(src.begin(), src.end());
  std::vector<int> d(dst.begin(), dst.end());
  const auto iw = weight.id;
  const auto ia = a.id;
  const bool needs = t.needs_grad(weight) || t.needs_grad(a);
  return t.record(std::move(out), needs, [iw, ia, s = std::move(s), d = std::move(d)](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    const auto& wv = tp.value(iw);
    const auto& av = tp.value(ia);
    const auto cols = av.cols();
    Real* gw = tp.needs_grad(iw) ? tp.grad_buffer(iw).data() : nullptr;
    Real* ga = tp.needs_grad(ia) ? tp.grad_buffer(ia).data() : nullptr;
    for (std::size_t e = 0; e < s.size(); ++e) {
      const Real* g = gy.data() + static_cast<std::size_t>(d[e]) * cols;
      const std::size_t xs = static_cast<std::size_t>(s[e]) * cols;
      if (gw) {
        Real* o = gw + e * cols;
        const Real* x = av.data() + xs;
        for (std::size_t c = 0; c < cols; ++c) o[c] += g[c] * x[c];
      }
      if (ga) {
        Real* o = ga + xs;
        const Real* w = wv.data() + e * cols;
        for (std::size_t c = 0; c < cols; ++c) o[c] += g[c] * w[c];
      }
    }
  });
}

template <typename Real>
Var<Real> concat_cols(std::span<const Var<Real>> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  auto& t = tape_of(parts[0]);
  const auto rows = parts[0].rows();
  std::size_t cols = 0;
  bool needs = false;
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    same_tape(parts[0], p);
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
    needs = needs || t.needs_grad(p);
    ids.push_back(p.id);
    widths.push_back(p.cols());
  }
  Tensor<Real> out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * v.cols(), v.cols(), out.data() + r * cols + offset);
    offset += v.cols();
  }
  return t.record(std::move(out), needs,
                  [ids = std::move(ids), widths = std::move(widths)](Tape<Real>& tp, std::uint32_t self) {
                    const auto& gy = tp.grad_buffer(self);
                    const auto cols = gy.cols();
                    std::size_t offset = 0;
                    for (std::size_t k = 0; k < ids.size(); ++k) {
                      if (tp.needs_grad(ids[k])) {
                        auto& g = tp.grad_buffer(ids[k]);
                        for (std::size_t r = 0; r < gy.rows(); ++r)
                          for (std::size_t c = 0; c < widths[k]; ++c) g(r, c) += gy.data()[r * cols + offset + c];
                      }
                      offset += widths[k];
                    }
                  });
}

template <typename Real>
Var<Real> batch_norm_train(Var<Real> x, Var<Real> gamma, Var<Real> beta, double eps, BatchMoments<Real>* moments) {
  auto& t = tape_of(x);
  same_tape(x, gamma);
  same_tape(x, beta);
  const auto& xv = x.value();
  const auto n = xv.rows();
  const auto d = xv.cols();
  if (gamma.rows() != 1 || gamma.cols() != d || beta.rows() != 1 || beta.cols() != d)
    throw ShapeError("batch_norm: gamma/beta must be (1, " + std::to_string(d) + ")");
  if (n == 0) throw ShapeError("batch_norm: empty batch");
  Tensor<Real> mean(1, d), var(1, d), inv_std(1, d), xhat(n, d), out(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    Real s = 0;
    for (std::size_t r = 0; r < n; ++r) s += xv(r, c);
    mean[c] = s / static_cast<Real>(n);
    Real ss = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const Real dev = xv(r, c) - mean[c];
      ss += dev * dev;
    }
    var[c] = ss / static_cast<Real>(n);
    inv_std[c] = Real(1) / std::sqrt(var[c] + static_cast<Real>(eps));
  }
  const auto& gv = gamma.value();
  const auto& bv = beta.value();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (xv(r, c) - mean[c]) * inv_std[c];
      out(r, c) = gv[c] * xhat(r, c) + bv[c];
    }
  if (moments) *moments = {mean, var};
  const bool needs = t.needs_grad(x) || t.needs_grad(gamma) || t.needs_grad(beta);
  const auto ix = x.id, ig = gamma.id, ib = beta.id;
  return t.record(std::move(out), needs,
                  [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape<Real>& tp,
                                                                                     std::uint32_t self) {
                    const auto& gy = tp.grad_buffer(self);
                    const auto n = gy.rows();
                    const auto d = gy.cols();
                    if (tp.needs_grad(ig)) {
                      auto& g = tp.grad_buffer(ig);
                      for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < d; ++c) g[c] += gy(r, c) * xhat(r, c);
                    }
                    if (tp.needs_grad(ib)) {
                      auto& g = tp.grad_buffer(ib);
                      for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < d; ++c) g[c] += gy(r, c);
                    }
                    if (tp.needs_grad(ix)) {
                      const auto& gv = tp.value(ig);
                      auto& g = tp.grad_buffer(ix);
                      const Real nn = static_cast<Real>(n);
                      for (std::size_t c = 0; c < d; ++c) {
                        Real s1 = 0, s2 = 0;
                        for (std::size_t r = 0; r < n; ++r) {
                          const Real dxhat = gy(r, c) * gv[c];
                          s1 += dxhat;
                          s2 += dxhat * xhat(r, c);
                        }
                        for (std::size_t r = 0; r < n; ++r) {
                          const Real dxhat = gy(r, c) * gv[c];
                          g(r, c) += inv_std[c] / nn * (nn * dxhat - s1 - xhat(r, c) * s2);
                        }
                      }
                    }
                  });
}

template <typename Real>
Var<Real> batch_norm_inference(Var<Real> x, Var<Real> gamma, Var<Real> beta, const Tensor<Real>& mean,
                               const Tensor<Real>& var, double eps) {
  auto& t = tape_of(x);
  same_tape(x, gamma);
  same_tape(x, beta);
  const auto& xv = x.value();
  const auto n = xv.rows();
  const auto d = xv.cols();
  if (gamma.cols() != d || beta.cols() != d || mean.cols() != d || var.cols() != d)
    throw ShapeError("batch_norm: statistics width does not match input " + shape_string(xv));
  Tensor<Real> inv_std(1, d), xhat(n, d), out(n, d);
  for (std::size_t c = 0; c < d; ++c) inv_std[c] = Real(1) / std::sqrt(var[c] + static_cast<Real>(eps));
  const auto& gv = gamma.value();
  const auto& bv = beta.value();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (xv(r, c) - mean[c]) * inv_std[c];
      out(r, c) = gv[c] * xhat(r, c) + bv[c];
    }
  const bool needs = t.needs_grad(x) || t.needs_grad(gamma) || t.needs_grad(beta);
  const auto ix = x.id, ig = gamma.id, ib = beta.id;
  return t.record(std::move(out), needs,
                  [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape<Real>& tp,
                                                                                     std::uint32_t self) {
                    const auto& gy = tp.grad_buffer(self);
                    const auto n = gy.rows();
                    const auto d = gy.cols();
                    if (tp.needs_grad(ig)) {
                      auto& g = tp.grad_buffer(ig);
                      for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < d; ++c) g[c] += gy(r, c) * xhat(r, c);
                    }
                    if (tp.needs_grad(ib)) {
                      auto& g = tp.grad_buffer(ib);
                      for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < d; ++c) g[c] += gy(r, c);
                    }
                    if (tp.needs_grad(ix)) {
                      const auto& gv = tp.value(ig);
                      auto& g = tp.grad_buffer(ix);
                      for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t c = 0; c < d; ++c) g(r, c) += gy(r, c) * gv[c] * inv_std[c];
                    }
                  });
}

template <typename Real>
Var<Real> abs(Var<Real> a) {
  auto& t = tape_of(a);
  Tensor<Real> out = a.value();
  for (auto& v : out.values()) v = std::abs(v);
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    const auto& x = tp.value(ia);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += x[i] > 0 ? gy[i] : (x[i] < 0 ? -gy[i] : Real(0));
  });
}

template <typename Real>
Var<Real> sum(Var<Real> a) {
  auto& t = tape_of(a);
  Real s = 0;
  for (auto v : a.value().values()) s += v;
  const auto ia = a.id;
  return t.record(Tensor<Real>(1, 1, s), t.needs_grad(a), [ia](Tape<Real>& tp, std::uint32_t self) {
    const Real gy = tp.grad_buffer(self)[0];
    for (auto& g : tp.grad_buffer(ia).values()) g += gy;
  });
}

template <typename Real>
Var<Real> mean(Var<Real> a) {
  const auto n = a.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

template <typename Real>
Var<Real> sum_squares(Var<Real> a) {
  auto& t = tape_of(a);
  Real s = 0;
  for (auto v : a.value().values()) s += v * v;
  const auto ia = a.id;
  return t.record(Tensor<Real>(1, 1, s), t.needs_grad(a), [ia](Tape<Real>& tp, std::uint32_t self) {
    const Real gy = tp.grad_buffer(self)[0];
    const auto& x = tp.value(ia);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += Real(2) * x[i] * gy;
  });
}

template <typename Real>
Var<Real> row_sum(Var<Real> a) {
  auto& t = tape_of(a);
  const auto& av = a.value();
  Tensor<Real> out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out[r] += av(r, c);
  const auto ia = a.id;
  return t.record(std::move(out), t.needs_grad(a), [ia](Tape<Real>& tp, std::uint32_t self) {
    const auto& gy = tp.grad_buffer(self);
    auto& g = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += gy[r];
  });
}

#define HETMOL_INSTANTIATE_OPS(R)                                                                                \
  template Var<R> matmul(Var<R>, Var<R>);                                                                        \
  template Var<R> edge_message(Var<R>, Var<R>, std::span<const int>, std::span<const int>, std::size_t);           \
  template Var<R> linear(Var<R>, Var<R>, Var<R>);                                                                \
  template Var<R> add(Var<R>, Var<R>);                                                                           \
  template Var<R> sub(Var<R>, Var<R>);                                                                           \
  template Var<R> hadamard(Var<R>, Var<R>);                                                                      \
  template Var<R> scale(Var<R>, double);                                                                         \
  template Var<R> shifted_softplus(Var<R>);                                                                      \
  template Var<R> leaky_relu(Var<R>, double);                                                                    \
  template Var<R> softmax_rows(Var<R>);                                                                          \
  template Var<R> gather_rows(Var<R>, std::span<const int>);                                                     \
  template Var<R> segment_sum(Var<R>, std::span<const int>, std::size_t);                                        \
  template Var<R> concat_cols(std::span<const Var<R>>);                                                          \
  template Var<R> batch_norm_train(Var<R>, Var<R>, Var<R>, double, BatchMoments<R>*);                            \
  template Var<R> batch_norm_inference(Var<R>, Var<R>, Var<R>, const Tensor<R>&, const Tensor<R>&, double);      \
  template Var<R> abs(Var<R>);                                                                                   \
  template Var<R> sum(Var<R>);                                                                                   \
  template Var<R> mean(Var<R>);                                                                                  \
  template Var<R> sum_squares(Var<R>);                                                                           \
  template Var<R> row_sum(Var<R>);

HETMOL_INSTANTIATE_OPS(float)
HETMOL_INSTANTIATE_OPS(double)

}  // namespace hetmol::nn
