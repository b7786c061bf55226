// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/model/hmgnn.hpp"

#include "hetmol/nn/init.hpp"

namespace hetmol::model {

void ModelConfig::validate() const {
  if (latent < 1) throw std::invalid_argument("latent dimension must be >= 1");
  if (depth < 1) throw std::invalid_argument("interaction depth must be >= 1");
  if (vocab_order1 < 1) throw std::invalid_argument("order-1 vocabulary is empty");
  if (use_order_2 && vocab_order2 < 1) throw std::invalid_argument("order-2 vocabulary is empty");
  if (k_distance < 2 || k_length < 2 || k_angle < 2) throw std::invalid_argument("RBF banks need at least 2 centers");
}

Batch make_batch(std::span<const graph::HeteroMolGraph* const> graphs,
                 std::span<const featurize::FeatureTables* const> features) {
  if (graphs.size() != features.size()) throw std::invalid_argument("graph and feature counts differ");
  return {graph::batch_hmgs(graphs), featurize::batch_features(features)};
}

namespace {

std::string layer_prefix(int order, int t) {
  return "order" + std::to_string(order) + "/layer" + std::to_string(t) + "/";
}

template <typename Real>
Tensor<Real> table(const std::vector<double>& values, std::size_t cols) {
  return Tensor<Real>(values.size() / cols, cols, std::vector<Real>(values.begin(), values.end()));
}

template <typename Real>
std::vector<double> column(const Tensor<Real>& t, std::size_t c) {
  std::vector<double> out(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) out[r] = static_cast<double>(t(r, c));
  return out;
}

template <typename Real>
PredictionValues values_of(const Prediction<Real>& p) {
  PredictionValues out;
  out.fused = column(p.fused.value(), 0);
  out.order1 = column(p.order1.value(), 0);
  out.alpha1 = column(p.alpha.value(), 0);
  if (p.order2.valid()) {
    out.order2 = column(p.order2.value(), 0);
    out.alpha2 = column(p.alpha.value(), 1);
  }
  return out;
}

}  // namespace

PredictionValues to_values(const Prediction<double>& p) { return values_of(p); }
PredictionValues to_values(const Prediction<float>& p) { return values_of(p); }

template <typename Real>
Hmgnn<Real>::Hmgnn(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  create_parameters(seed);
}

template <typename Real>
void Hmgnn<Real>::create_parameters(std::uint64_t seed) {
  Rng rng(seed);
  const auto f = static_cast<std::size_t>(config_.latent);
  const int orders = config_.num_orders();
  const auto cast = [](const Tensor<double>& t) {
    return Tensor<Real>(t.rows(), t.cols(), std::vector<Real>(t.values().begin(), t.values().end()));
  };
  const auto weight = [&](const std::string& name, std::size_t rows, std::size_t cols, nn::OrderTag tag) {
    params_.add(name, cast(nn::glorot_orthogonal(rows, cols, rng)), tag);
  };
  const auto bias = [&](const std::string& name, std::size_t cols, nn::OrderTag tag) {
    params_.add(name, Tensor<Real>(1, cols), tag);
  };
  const auto dense = [&](const std::string& prefix, std::size_t in, nn::OrderTag tag) {
    weight(prefix + "W", in, f, tag);
    bias(prefix + "b", f, tag);
  };

  for (int p = 1; p <= orders; ++p) {
    const auto tag = static_cast<nn::OrderTag>(p);
    const std::string o = "order" + std::to_string(p) + "/";
    const auto vocab = static_cast<std::size_t>(p == 1 ? config_.vocab_order1 : config_.vocab_order2);
    params_.add(o + "input/embedding", cast(nn::uniform_embedding(vocab, f, rng)), tag);
    dense(o + "input/", p == 1 ? f : f + static_cast<std::size_t>(config_.k_length), tag);
    for (int t = 0; t < config_.depth; ++t) {
      const std::string l = layer_prefix(p, t);
      weight(l + "msg_same/G", static_cast<std::size_t>(p == 1 ? config_.k_distance : config_.k_angle), f, tag);
      dense(l + "msg_same/", f, tag);
      if (orders == 2 && config_.use_inter_order_edges) dense(l + (p == 1 ? "msg_from2/" : "msg_from1/"), f, tag);
      dense(l + "update/", f * static_cast<std::size_t>(1 + orders), tag);
      dense(l + "dense0/", f, tag);
      dense(l + "dense1/", f, tag);
    }
    weight(o + "output/w", f, 1, tag);
    bias(o + "output/b", 1, tag);
    params_.add(o + "output/scale", Tensor<Real>(vocab, 1, Real(1)), tag);
    params_.add(o + "output/shift", Tensor<Real>(vocab, 1), tag);
  }

  if (orders == 2) {
    const auto shared = nn::OrderTag::kShared;
    params_.add("fusion/bn/gamma", Tensor<Real>(1, 2 * f, Real(1)), shared);
    params_.add("fusion/bn/beta", Tensor<Real>(1, 2 * f), shared);
    dense("fusion/dense/", 2 * f, shared);
    weight("fusion/attention", f, 2, shared);
  }
}

template <typename Real>
Prediction<Real> Hmgnn<Real>::forward(Tape<Real>& tape, const Batch& batch, Mode mode) {
  const auto& g = batch.graph;
  const auto& feats = batch.features;
  const bool two = config_.use_order_2;
  const bool cross = two && config_.use_inter_order_edges;
  const auto n_mol = batch.num_molecules();
  const auto f = static_cast<std::size_t>(config_.latent);
  if (feats.k_distance != config_.k_distance || feats.k_length != config_.k_length || feats.k_angle != config_.k_angle)
    throw ModelError("feature widths do not match the model's RBF sizes");

  Var<Real> h1 = input_module(tape, params_, "order1/input/", g.atom_composition, Var<Real>{});
  Var<Real> h2;
  Var<Real> e11 = tape.constant(table<Real>(feats.atom_atom, static_cast<std::size_t>(feats.k_distance)));
  Var<Real> e22;
  if (two) {
    const auto x2 = tape.constant(table<Real>(feats.pair, static_cast<std::size_t>(feats.k_length)));
    h2 = input_module(tape, params_, "order2/input/", g.pair_composition, x2);
    e22 = tape.constant(table<Real>(feats.pair_pair, static_cast<std::size_t>(feats.k_angle)));
  }

  for (int t = 0; t < config_.depth; ++t) {
    const std::string l1 = layer_prefix(1, t);
    const Var<Real> m11 = message_same_order(tape, params_, l1 + "msg_same/", h1, g.atom_atom.src, g.atom_atom.dst, e11);
    if (!two) {
      const Var<Real> msgs[] = {m11};
      h1 = node_update<Real>(tape, params_, l1, h1, msgs);
      continue;
    }
    const std::string l2 = layer_prefix(2, t);
    const Var<Real> m22 = message_same_order(tape, params_, l2 + "msg_same/", h2, g.pair_pair.src, g.pair_pair.dst, e22);
    Var<Real> m21, m12;  // m21: order 2 -> order 1
    if (cross) {
      m21 = message_cross_order(tape, params_, l1 + "msg_from2/", h2, g.atom_pair.dst, g.atom_pair.src, g.num_atoms());
      m12 = message_cross_order(tape, params_, l2 + "msg_from1/", h1, g.atom_pair.src, g.atom_pair.dst, g.num_pairs());
    } else {
      m21 = tape.constant(Tensor<Real>(g.num_atoms(), f));
      m12 = tape.constant(Tensor<Real>(g.num_pairs(), f));
    }
    const Var<Real> msgs1[] = {m11, m21};
    const Var<Real> msgs2[] = {m12, m22};
    const Var<Real> next1 = node_update<Real>(tape, params_, l1, h1, msgs1);
    h2 = node_update<Real>(tape, params_, l2, h2, msgs2);
    h1 = next1;
  }

  Prediction<Real> out;
  out.order1 = nn::segment_sum(output_module(tape, params_, "order1/output/", h1, g.atom_composition),
                               g.atom_molecule, n_mol);
  if (!two) {
    out.alpha = tape.constant(Tensor<Real>(n_mol, 1, Real(1)));
    out.fused = out.order1;
    return out;
  }
  out.order2 = nn::segment_sum(output_module(tape, params_, "order2/output/", h2, g.pair_composition),
                               g.pair_molecule, n_mol);

  FusionNorm<Real> norm;
  norm.eps = config_.bn_eps;
  nn::BatchMoments<Real> moments;
  bool update = false;
  if (mode == Mode::kInference) {
    if (stats_.updates == 0) throw ModelError("batch-norm inference before any training statistics exist");
    norm.kind = FusionNorm<Real>::Kind::kFixed;
  } else if (n_mol == 1 && stats_.updates > 0) {
    // A single molecule has no batch variance; fall back to running statistics.
    norm.kind = FusionNorm<Real>::Kind::kFixed;
  } else {
    norm.kind = FusionNorm<Real>::Kind::kBatch;
    norm.moments_out = &moments;
    update = mode == Mode::kTrain && n_mol > 1;
  }
  norm.mean = &stats_.mean;
  norm.var = &stats_.var;

  const Var<Real> hs[] = {h1, h2};
  const std::span<const int> segs[] = {g.atom_molecule, g.pair_molecule};
  out.alpha = fusion_module<Real>(tape, params_, hs, segs, n_mol, norm, config_.leaky_slope);
  const Var<Real> heads[] = {out.order1, out.order2};
  out.fused = nn::row_sum(nn::hadamard(out.alpha, nn::concat_cols<Real>(heads)));

  if (update) {
    if (stats_.updates == 0) {
      stats_.mean = moments.mean;
      stats_.var = moments.var;
    } else {
      const Real rate = static_cast<Real>(1.0 - config_.bn_momentum);
      for (std::size_t i = 0; i < stats_.mean.size(); ++i) {
        stats_.mean[i] += rate * (moments.mean[i] - stats_.mean[i]);
        stats_.var[i] += rate * (moments.var[i] - stats_.var[i]);
      }
    }
    ++stats_.updates;
  }
  return out;
}

template <typename Real>
PredictionValues Hmgnn<Real>::predict(const Batch& batch, Mode mode) {
  Tape<Real> tape(false);
  return values_of(forward(tape, batch, mode));
}

template <typename Real>
void Hmgnn<Real>::save(io::Archive& archive) const {
  params_.save(archive, "param/");
  archive.put_scalar("norm/updates", stats_.updates);
  if (stats_.updates > 0) {
    const std::vector<std::int64_t> shape{1, static_cast<std::int64_t>(stats_.mean.size())};
    archive.put_f64("norm/mean", shape, nn::to_f64(stats_.mean));
    archive.put_f64("norm/var", shape, nn::to_f64(stats_.var));
  }
}

template <typename Real>
void Hmgnn<Real>::load(const io::Archive& archive) {
  const auto stored = archive.names_with_prefix("param/");
  if (stored.size() != params_.entries().size()) {
    for (const auto& name : stored)
      if (!params_.contains(name.substr(6)))
        throw io::ArchiveError("checkpoint parameter '" + name + "' does not belong to this model");
  }
  params_.load(archive, "param/");
  stats_.updates = archive.scalar_i64("norm/updates");
  if (stats_.updates > 0) {
    const std::int64_t width = static_cast<std::int64_t>(2 * config_.latent);
    stats_.mean = nn::from_f64<Real>(1, static_cast<std::size_t>(width), archive.f64("norm/mean", {1, width}));
    stats_.var = nn::from_f64<Real>(1, static_cast<std::size_t>(width), archive.f64("norm/var", {1, width}));
  } else {
    stats_ = {};
  }
}

template class Hmgnn<float>;
template class Hmgnn<double>;

}  // namespace hetmol::model
