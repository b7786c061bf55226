// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/ablation.hpp"

#include <filesystem>

namespace hetmol::train {

namespace fs = std::filesystem;

AblationMode parse_ablation(const std::string& name) {
  if (name == "remove_mtl") return AblationMode::kRemoveMtl;
  if (name == "remove_iomp") return AblationMode::kRemoveIomp;
  if (name == "remove_ho") return AblationMode::kRemoveHo;
  throw ConfigError("unknown ablation mode '" + name + "'; valid modes: remove_mtl, remove_iomp, remove_ho");
}

std::string ablation_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::kRemoveMtl:
      return "remove_mtl";
    case AblationMode::kRemoveIomp:
      return "remove_iomp";
    case AblationMode::kRemoveHo:
      return "remove_ho";
  }
  return "unknown";
}

TrainConfig ablated_config(const TrainConfig& baseline, AblationMode mode) {
  TrainConfig c = baseline;
  switch (mode) {
    case AblationMode::kRemoveMtl:
      c.use_mtl_loss = false;
      break;
    case AblationMode::kRemoveIomp:
      c.use_inter_order_edges = false;
      break;
    case AblationMode::kRemoveHo:
      c.use_order_2 = false;
      break;
  }
  return c;
}

namespace {

template <typename Real>
EvalReport evaluate_best(const fs::path& checkpoint, const LoadedData& loaded, std::int64_t batch_size) {
  auto ck = load_checkpoint<Real>(checkpoint);
  const bool use_test = !loaded.split.test.empty();
  return evaluate(*ck.model, loaded.data, use_test ? loaded.split.test : loaded.split.val, batch_size,
                  model::Mode::kInference, use_test ? "test" : "val");
}

EvalReport train_and_report(const TrainConfig& config, const LoadedData& loaded, const TrainOptions& options) {
  const fs::path best = fs::path(config.out_dir) / "best.ckpt";
  const fs::path last = fs::path(config.out_dir) / "last.ckpt";
  bool reuse = false;
  if (fs::exists(best) && fs::exists(last)) {
    const auto meta = read_checkpoint_meta(last);
    reuse = config_to_json(meta.config) == config_to_json(config) && meta.dataset_hash == loaded.dataset_hash;
  }
  if (!reuse) {
    TrainOptions opts = options;
    opts.resume = false;
    opts.stop_at_step.reset();
    run_training(config, loaded, opts);
  }
  return config.precision == Precision::kF32 ? evaluate_best<float>(best, loaded, config.eval_batch_size)
                                             : evaluate_best<double>(best, loaded, config.eval_batch_size);
}

}  // namespace

AblationReport run_ablation(AblationMode mode, const TrainConfig& baseline, const LoadedData& data,
                            const TrainOptions& options) {
  TrainConfig base = baseline;
  base.out_dir = (fs::path(baseline.out_dir) / "default").string();
  TrainConfig variant = ablated_config(baseline, mode);
  variant.out_dir = (fs::path(baseline.out_dir) / ablation_name(mode)).string();
  AblationReport report{mode, {}, {}};
  report.baseline = train_and_report(base, data, options);
  report.variant = train_and_report(variant, data, options);
  return report;
}

}  // namespace hetmol::train
