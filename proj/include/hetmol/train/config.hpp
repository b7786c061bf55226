// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "hetmol/ingest/molecule.hpp"
#include "hetmol/model/hmgnn.hpp"

namespace hetmol::train {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Precision { kF64, kF32 };

/// Every training hyperparameter. Defaults are the full-scale settings;
/// desk-scale runs override sizes and step counts from a config file.
struct TrainConfig {
  std::string dataset;
  std::string out_dir = "run";
  ingest::Property target = ingest::Property::kU0;
  Precision precision = Precision::kF64;

  std::int64_t n_train = 110000;
  std::int64_t n_val = 10000;
  std::int64_t n_test = 10831;
  std::uint64_t split_seed = 0;
  std::uint64_t model_seed = 1;
  std::uint64_t shuffle_seed = 2;

  std::int64_t batch_size = 32;
  std::int64_t eval_batch_size = 256;
  double learning_rate = 1e-3;
  double lr_decay_factor = 0.1;
  std::int64_t lr_decay_steps = 2000000;
  std::int64_t max_steps = 3000000;
  std::int64_t eval_every = 1000;
  std::int64_t patience_evals = 1000;
  double lambda = 1e-6;
  double clip_grad_norm = 0.0;  // 0 disables clipping

  std::optional<double> cutoff;  // unset: chosen from the target
  int latent = 128;
  int depth = 5;
  int rbf_distance = 64;
  int rbf_length = 64;
  int rbf_angle = 64;
  double leaky_slope = 0.2;
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  bool use_mtl_loss = true;
  bool use_inter_order_edges = true;
  bool use_order_2 = true;

  /// Cutoff in Angstrom: explicit value, else 3 for zpve, U0, U, H, G and Cv
  /// and 5 for every other target.
  double resolved_cutoff() const;

  /// Model hyperparameters for the given vocabulary sizes.
  model::ModelConfig model_config(int vocab_order1, int vocab_order2) const;

  /// Throws ConfigError describing the first invalid value.
  void validate() const;
};

/// Parses a flat JSON object. Unknown keys, wrong types and invalid values
/// are ConfigErrors.
TrainConfig parse_config(const std::string& json_text);
TrainConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys) of every field except out_dir, used as the
/// config echo in checkpoints. The output location is left out so that runs
/// differing only in where they write produce identical checkpoints.
std::string config_to_json(const TrainConfig& config);

double default_cutoff(ingest::Property target);
std::string precision_name(Precision p);
Precision parse_precision(const std::string& name);

}  // namespace hetmol::train
