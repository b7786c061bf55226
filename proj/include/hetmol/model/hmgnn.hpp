// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetmol/common/archive.hpp"
#include "hetmol/featurize/rbf.hpp"
#include "hetmol/graph/hmg.hpp"
#include "hetmol/model/modules.hpp"

namespace hetmol::model {

struct ModelConfig {
  int latent = 128;  // F
  int depth = 5;     // T, number of interaction modules
  int vocab_order1 = 0;
  int vocab_order2 = 0;
  int k_distance = 64;
  int k_length = 64;
  int k_angle = 64;
  bool use_order_2 = true;
  bool use_inter_order_edges = true;
  double leaky_slope = 0.2;
  double bn_eps = 1e-5;
  double bn_momentum = 0.9;

  int num_orders() const { return use_order_2 ? 2 : 1; }
  /// Throws std::invalid_argument on a non-positive size.
  void validate() const;
};

class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A batch of molecules ready for the network.
struct Batch {
  graph::HeteroMolGraph graph;
  featurize::FeatureTables features;

  std::size_t num_molecules() const { return static_cast<std::size_t>(graph.n_molecules); }
};

Batch make_batch(std::span<const graph::HeteroMolGraph* const> graphs,
                 std::span<const featurize::FeatureTables* const> features);

enum class Mode {
  kTrain,        // batch statistics in the fusion norm, running statistics updated
  kBatchStats,   // batch statistics, running statistics untouched
  kInference,    // running statistics; an error before any were collected
};

/// Per-molecule outputs, each of shape (molecules, 1) except alpha, which is
/// (molecules, orders). order2 is invalid when the model has a single order.
template <typename Real>
struct Prediction {
  Var<Real> fused;
  Var<Real> order1;
  Var<Real> order2;
  Var<Real> alpha;
};

/// Plain-number copy of a Prediction.
struct PredictionValues {
  std::vector<double> fused;
  std::vector<double> order1;
  std::vector<double> order2;  // empty for a single-order model
  std::vector<double> alpha1;
  std::vector<double> alpha2;  // empty for a single-order model
};

/// Running statistics of the fusion batch norm. The first update copies the
/// batch moments; later ones move by (1 - momentum) towards them.
template <typename Real>
struct NormStats {
  Tensor<Real> mean;
  Tensor<Real> var;
  std::int64_t updates = 0;
};

/// Heterogeneous molecular graph network over orders 1 and 2.
template <typename Real>
class Hmgnn {
 public:
  Hmgnn(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParameterStore<Real>& params() { return params_; }
  const ParameterStore<Real>& params() const { return params_; }
  NormStats<Real>& norm_stats() { return stats_; }
  const NormStats<Real>& norm_stats() const { return stats_; }

  Prediction<Real> forward(Tape<Real>& tape, const Batch& batch, Mode mode);

  /// Forward pass without gradient recording.
  PredictionValues predict(const Batch& batch, Mode mode = Mode::kInference);

  /// Parameters under "param/", norm statistics under "norm/".
  void save(io::Archive& archive) const;
  void load(const io::Archive& archive);

 private:
  void create_parameters(std::uint64_t seed);

  ModelConfig config_;
  ParameterStore<Real> params_;
  NormStats<Real> stats_;
};

PredictionValues to_values(const Prediction<double>& p);
PredictionValues to_values(const Prediction<float>& p);

}  // namespace hetmol::model
