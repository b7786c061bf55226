// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/checkpoint.hpp"

#include "hetmol/graph/cache.hpp"

namespace hetmol::train {

namespace {

void put_bank(io::Archive& a, const std::string& name, const featurize::RbfBank& bank) {
  a.put_scalar("banks/" + name + "/size", static_cast<std::int64_t>(bank.size));
  a.put_scalar("banks/" + name + "/lo", bank.lo);
  a.put_scalar("banks/" + name + "/hi", bank.hi);
}

featurize::RbfBank get_bank(const io::Archive& a, const std::string& name) {
  return featurize::make_bank(a.scalar_f64("banks/" + name + "/lo"), a.scalar_f64("banks/" + name + "/hi"),
                              static_cast<int>(a.scalar_i64("banks/" + name + "/size")));
}

CheckpointMeta meta_from(const io::Archive& a) {
  CheckpointMeta meta;
  meta.config = parse_config(a.bytes("config"));
  meta.banks.distance = get_bank(a, "distance");
  meta.banks.length = get_bank(a, "length");
  meta.banks.angle = get_bank(a, "angle");
  meta.banks.cutoff = a.scalar_f64("banks/cutoff");
  meta.vocabulary = graph::read_vocabulary(a);
  meta.dataset_hash = a.bytes("meta/dataset_hash");
  return meta;
}

}  // namespace

template <typename Real>
io::Archive checkpoint_archive(const CheckpointMeta& meta, const model::Hmgnn<Real>& model,
                               const nn::AmsGrad<Real>& optimizer, const TrainState& state) {
  io::Archive a(kCheckpointKind, kCheckpointVersion);
  a.put_bytes("config", config_to_json(meta.config));
  a.put_bytes("meta/dataset_hash", meta.dataset_hash);
  put_bank(a, "distance", meta.banks.distance);
  put_bank(a, "length", meta.banks.length);
  put_bank(a, "angle", meta.banks.angle);
  a.put_scalar("banks/cutoff", meta.banks.cutoff);
  graph::write_vocabulary(a, meta.vocabulary);
  model.save(a);
  optimizer.save(a, "opt/");
  a.put_scalar("train/step", state.step);
  a.put_scalar("train/epoch", state.epoch);
  a.put_bytes("train/rng", state.rng_state);
  a.put_i64("train/permutation", {static_cast<std::int64_t>(state.permutation.size())}, state.permutation);
  a.put_scalar("train/cursor", state.cursor);
  a.put_scalar("train/evals", state.evals);
  a.put_scalar("train/evals_since_best", state.evals_since_best);
  a.put_scalar("train/best_val_mae", state.best_val_mae);
  a.put_scalar("train/best_step", state.best_step);
  a.put_scalar("train/step0_train_mae", state.step0_train_mae);
  a.put_scalar("train/loss_sum", state.loss_sum);
  a.put_scalar("train/loss_count", state.loss_count);
  return a;
}

template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta, const model::Hmgnn<Real>& model,
                     const nn::AmsGrad<Real>& optimizer, const TrainState& state) {
  checkpoint_archive(meta, model, optimizer, state).save(path);
}

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path) {
  return meta_from(io::Archive::load(path, kCheckpointKind, kCheckpointVersion));
}

template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path) {
  const auto a = io::Archive::load(path, kCheckpointKind, kCheckpointVersion);
  Checkpoint<Real> ck;
  ck.meta = meta_from(a);
  const auto& cfg = ck.meta.config;
  ck.model = std::make_unique<model::Hmgnn<Real>>(
      cfg.model_config(ck.meta.vocabulary.size(1), ck.meta.vocabulary.size(2)), cfg.model_seed);
  ck.model->load(a);
  ck.optimizer = nn::AmsGrad<Real>({cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
  ck.optimizer.load(a, "opt/", ck.model->params());
  auto& s = ck.state;
  s.step = a.scalar_i64("train/step");
  s.epoch = a.scalar_i64("train/epoch");
  s.rng_state = a.bytes("train/rng");
  s.permutation = a.i64("train/permutation");
  s.cursor = a.scalar_i64("train/cursor");
  s.evals = a.scalar_i64("train/evals");
  s.evals_since_best = a.scalar_i64("train/evals_since_best");
  s.best_val_mae = a.scalar_f64("train/best_val_mae");
  s.best_step = a.scalar_i64("train/best_step");
  s.step0_train_mae = a.scalar_f64("train/step0_train_mae");
  s.loss_sum = a.scalar_f64("train/loss_sum");
  s.loss_count = a.scalar_i64("train/loss_count");
  return ck;
}

template io::Archive checkpoint_archive(const CheckpointMeta&, const model::Hmgnn<float>&, const nn::AmsGrad<float>&,
                                        const TrainState&);
template io::Archive checkpoint_archive(const CheckpointMeta&, const model::Hmgnn<double>&,
                                        const nn::AmsGrad<double>&, const TrainState&);
template void save_checkpoint(const std::filesystem::path&, const CheckpointMeta&, const model::Hmgnn<float>&,
                              const nn::AmsGrad<float>&, const TrainState&);
template void save_checkpoint(const std::filesystem::path&, const CheckpointMeta&, const model::Hmgnn<double>&,
                              const nn::AmsGrad<double>&, const TrainState&);
template Checkpoint<float> load_checkpoint(const std::filesystem::path&);
template Checkpoint<double> load_checkpoint(const std::filesystem::path&);

}  // namespace hetmol::train
