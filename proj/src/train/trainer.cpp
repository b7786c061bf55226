// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hetmol/common/content_hash.hpp"
#include "hetmol/common/rng.hpp"
#include "hetmol/train/loss.hpp"
#include "json.hpp"

namespace hetmol::train {

namespace fs = std::filesystem;
using nlohmann::json;

featurize::FeatureBanks banks_for(const TrainConfig& config) {
  return featurize::FeatureBanks::standard(config.resolved_cutoff(), config.rbf_distance, config.rbf_length,
                                           config.rbf_angle);
}

namespace {

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json eval_record(const EvalReport& r, double lr, double train_loss, double best) {
  json j;
  j["step"] = r.step;
  j["lr"] = lr;
  j["train_loss"] = nullable(train_loss);
  j["val_mae"] = r.mae_fused;
  j["val_mae_order1"] = r.mae_order1;
  j["val_mae_order2"] = nullable(r.mae_order2);
  j["alpha1"] = r.mean_alpha1;
  j["alpha2"] = r.has_order2 ? json(r.mean_alpha2) : json(nullptr);
  j["best_val_mae"] = best;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::vector<std::int64_t> next_batch(TrainState& state, Rng& rng, const std::vector<std::int64_t>& train,
                                     std::int64_t batch_size) {
  if (state.cursor >= static_cast<std::int64_t>(state.permutation.size())) {
    state.permutation = train;
    rng.shuffle(state.permutation);
    state.cursor = 0;
    ++state.epoch;
  }
  const auto begin = state.permutation.begin() + state.cursor;
  const auto take = std::min<std::int64_t>(batch_size, static_cast<std::int64_t>(state.permutation.size()) - state.cursor);
  std::vector<std::int64_t> batch(begin, begin + take);
  std::sort(batch.begin(), batch.end());
  state.cursor += take;
  return batch;
}

template <typename Real>
void clip_gradients(nn::ParameterStore<Real>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, p] : params.entries())
    for (Real g : p.grad.values()) sq += static_cast<double>(g) * static_cast<double>(g);
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const Real factor = static_cast<Real>(max_norm / norm);
  for (auto& [name, p] : params.entries())
    for (auto& g : p.grad.values()) g *= factor;
}

}  // namespace

template <typename Real>
TrainResult train_loop(const TrainConfig& config, const TrainingData& data, const ingest::Split& split,
                       const std::string& dataset_hash, const TrainOptions& options) {
  config.validate();
  if (split.train.empty()) throw ConfigError("training split is empty");
  if (split.val.empty()) throw ConfigError("validation split is empty; early stopping needs n_val >= 1");
  const fs::path out(config.out_dir);
  fs::create_directories(out);
  TrainResult result;
  result.last_checkpoint = out / "last.ckpt";
  result.best_checkpoint = out / "best.ckpt";
  result.metrics = out / "metrics.jsonl";

  CheckpointMeta meta{config, data.banks, data.vocabulary, dataset_hash};
  std::unique_ptr<model::Hmgnn<Real>> model;
  nn::AmsGrad<Real> optimizer({config.adam_beta1, config.adam_beta2, config.adam_eps});
  TrainState state;
  Rng rng(config.shuffle_seed);

  const auto log = [&](const std::string& line) {
    if (options.log) options.log(line);
  };

  if (options.resume) {
    auto ck = load_checkpoint<Real>(result.last_checkpoint);
    if (config_to_json(ck.meta.config) != config_to_json(config))
      throw ConfigError("cannot resume: " + result.last_checkpoint.string() + " was written with a different config");
    if (ck.meta.dataset_hash != dataset_hash)
      throw ConfigError("cannot resume: the dataset differs from the one the checkpoint was trained on");
    model = std::move(ck.model);
    optimizer = std::move(ck.optimizer);
    state = std::move(ck.state);
    rng.restore(state.rng_state);
    meta.vocabulary = ck.meta.vocabulary;
    log("resumed at step " + std::to_string(state.step));
  } else {
    model = std::make_unique<model::Hmgnn<Real>>(
        config.model_config(data.vocabulary.size(1), data.vocabulary.size(2)), config.model_seed);
    std::ofstream(result.metrics, std::ios::trunc);
    // No running statistics exist yet, so the step-0 baseline normalises with
    // batch statistics.
    const auto r0 = evaluate(*model, data, split.train, config.eval_batch_size, model::Mode::kBatchStats, "train");
    state.step0_train_mae = r0.mae_fused;
    json j;
    j["step"] = 0;
    j["train_mae"] = r0.mae_fused;
    j["train_mae_order1"] = r0.mae_order1;
    j["train_mae_order2"] = nullable(r0.mae_order2);
    std::ofstream(result.metrics, std::ios::app) << j.dump() << '\n';
  }
  result.step0_train_mae = state.step0_train_mae;

  const auto save = [&](const fs::path& path) {
    state.rng_state = rng.state();
    save_checkpoint(path, meta, *model, optimizer, state);
  };

  auto& params = model->params();
  params.zero_grad();
  while (state.step < config.max_steps) {
    if (options.stop_at_step && state.step >= *options.stop_at_step) {
      result.interrupted = true;
      break;
    }
    const auto idx = next_batch(state, rng, split.train, config.batch_size);
    const auto batch = gather_batch(data, idx);
    const auto y = gather_targets(data, idx);

    nn::Tape<Real> tape;
    const auto pred = model->forward(tape, batch, model::Mode::kTrain);
    const auto targets = tape.constant(nn::Tensor<Real>(y.size(), 1, std::vector<Real>(y.begin(), y.end())));
    const auto loss = mtl_loss(tape, pred, targets, params, config.lambda, config.use_mtl_loss);
    const double loss_value = static_cast<double>(loss.value()[0]);
    if (!std::isfinite(loss_value)) throw TrainingError(state.step, "non-finite training loss");
    tape.backward(loss);
    if (config.clip_grad_norm > 0.0) clip_gradients(params, config.clip_grad_norm);
    const double lr = lr_at(state.step, config.learning_rate, config.lr_decay_factor, config.lr_decay_steps);
    optimizer.step(params, lr);
    params.zero_grad();
    ++state.step;
    state.loss_sum += loss_value;
    ++state.loss_count;

    if (state.step % config.eval_every == 0 || state.step == config.max_steps) {
      auto report = evaluate(*model, data, split.val, config.eval_batch_size, model::Mode::kInference, "val");
      report.step = state.step;
      ++state.evals;
      const bool improved = report.mae_fused < state.best_val_mae;
      if (improved) {
        state.best_val_mae = report.mae_fused;
        state.best_step = state.step;
        state.evals_since_best = 0;
      } else {
        ++state.evals_since_best;
      }
      const double train_loss = state.loss_count ? state.loss_sum / static_cast<double>(state.loss_count) : std::nan("");
      state.loss_sum = 0.0;
      state.loss_count = 0;
      std::ofstream(result.metrics, std::ios::app) << eval_record(report, lr, train_loss, state.best_val_mae).dump()
                                                   << '\n';
      result.history.push_back(report);
      if (improved) save(result.best_checkpoint);
      log("step " + std::to_string(state.step) + "  loss " + std::to_string(train_loss) + "  val MAE " +
          std::to_string(report.mae_fused) + (improved ? "  *" : ""));
      if (state.evals_since_best >= config.patience_evals) {
        result.early_stopped = true;
        break;
      }
    }
  }
  save(result.last_checkpoint);
  if (!fs::exists(result.best_checkpoint)) save(result.best_checkpoint);
  result.steps = state.step;
  // Report what best.ckpt actually holds, which also covers resumed runs whose
  // best evaluation happened in an earlier process.
  auto best = load_checkpoint<Real>(result.best_checkpoint);
  result.best = evaluate(*best.model, data, split.val, config.eval_batch_size, model::Mode::kInference, "val");
  result.best.step = best.state.step;
  return result;
}

LoadedData load_training_data(const TrainConfig& config, int threads) {
  if (config.dataset.empty()) throw ConfigError("config key 'dataset' is required");
  if (!fs::exists(config.dataset)) throw ConfigError("dataset cache not found: " + config.dataset);
  LoadedData out;
  out.dataset_hash = git_blob_hash_file(config.dataset);
  out.data = make_training_data(load_dataset(config.dataset), banks_for(config), config.target, threads);
  out.split = ingest::split_dataset(static_cast<std::int64_t>(out.data.size()),
                                    {config.n_train, config.n_val, config.n_test, config.split_seed});
  return out;
}

TrainResult run_training(const TrainConfig& config, const LoadedData& loaded, const TrainOptions& options) {
  if (config.precision == Precision::kF32)
    return train_loop<float>(config, loaded.data, loaded.split, loaded.dataset_hash, options);
  return train_loop<double>(config, loaded.data, loaded.split, loaded.dataset_hash, options);
}

TrainResult run_training(const TrainConfig& config, const TrainOptions& options) {
  return run_training(config, load_training_data(config, options.threads), options);
}

template TrainResult train_loop<float>(const TrainConfig&, const TrainingData&, const ingest::Split&,
                                       const std::string&, const TrainOptions&);
template TrainResult train_loop<double>(const TrainConfig&, const TrainingData&, const ingest::Split&,
                                        const std::string&, const TrainOptions&);

}  // namespace hetmol::train
