// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hetmol/common/content_hash.hpp"
#include "hetmol/graph/counting.hpp"
#include "hetmol/ingest/reference.hpp"
#include "hetmol/ingest/xyz.hpp"
#include "hetmol/train/checkpoint.hpp"
#include "hetmol/train/dataset.hpp"
#include "hetmol/train/evaluate.hpp"
#include "hetmol/train/trainer.hpp"
#include "json.hpp"

namespace hetmol::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json report_json(const train::EvalReport& r) {
  json j;
  j["split"] = r.split;
  j["molecules"] = r.molecules;
  j["step"] = r.step;
  j["mae_fused"] = r.mae_fused;
  j["mae_order1"] = r.mae_order1;
  j["mae_order2"] = nullable(r.mae_order2);
  j["mean_alpha1"] = r.mean_alpha1;
  j["mean_alpha2"] = r.has_order2 ? json(r.mean_alpha2) : json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

train::Precision precision_for(const GlobalOptions& global, const train::TrainConfig& config) {
  return global.precision ? train::parse_precision(*global.precision) : config.precision;
}

bool has_xyz_files(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() &&
        (name.ends_with(".xyz") || name.ends_with(".xyz.gz")))
      return true;
  }
  return false;
}

std::vector<ingest::Molecule> read_input(const fs::path& input) {
  if (!fs::exists(input)) throw UsageError("input not found: " + input.string());
  if (fs::is_directory(input) && !has_xyz_files(input))
    throw UsageError("input directory " + input.string() + " contains no .xyz or .xyz.gz files");
  return ingest::read_xyz_source(input);
}

template <typename Real>
train::EvalReport eval_checkpoint(const fs::path& path, const train::TrainingData& data,
                                  std::span<const std::int64_t> indices, std::int64_t batch, const std::string& split) {
  auto ck = train::load_checkpoint<Real>(path);
  auto r = train::evaluate(*ck.model, data, indices, batch, model::Mode::kInference, split);
  r.step = ck.state.step;
  return r;
}

template <typename Real>
model::PredictionValues predict_checkpoint(const fs::path& path, const std::vector<ingest::Molecule>& molecules,
                                           int threads, double* featurize_seconds = nullptr,
                                           double* inference_seconds = nullptr, std::int64_t batch = 256) {
  auto ck = train::load_checkpoint<Real>(path);
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = train::make_inference_data(molecules, ck.meta.vocabulary, ck.meta.banks, ck.meta.config.target,
                                               threads);
  const auto t1 = std::chrono::steady_clock::now();
  std::vector<std::int64_t> all(molecules.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int64_t>(i);
  auto p = train::predict_indices(*ck.model, data, all, batch, model::Mode::kInference);
  const auto t2 = std::chrono::steady_clock::now();
  if (featurize_seconds) *featurize_seconds = std::chrono::duration<double>(t1 - t0).count();
  if (inference_seconds) *inference_seconds = std::chrono::duration<double>(t2 - t1).count();
  return p;
}

model::PredictionValues predict_any(const fs::path& path, const std::vector<ingest::Molecule>& molecules,
                                    const GlobalOptions& global, double* featurize_seconds = nullptr,
                                    double* inference_seconds = nullptr, std::int64_t batch = 256) {
  const auto meta = train::read_checkpoint_meta(path);
  if (precision_for(global, meta.config) == train::Precision::kF32)
    return predict_checkpoint<float>(path, molecules, global.threads, featurize_seconds, inference_seconds, batch);
  return predict_checkpoint<double>(path, molecules, global.threads, featurize_seconds, inference_seconds, batch);
}

}  // namespace

train::TrainConfig resolve_config(const GlobalOptions& global) {
  train::TrainConfig config = global.config ? train::load_config(*global.config) : train::TrainConfig{};
  if (global.seed) {
    config.split_seed = *global.seed;
    config.model_seed = *global.seed + 1;
    config.shuffle_seed = *global.seed + 2;
  }
  if (global.precision) config.precision = train::parse_precision(*global.precision);
  return config;
}

int cmd_prepare(const GlobalOptions& global, const PrepareOptions& options, std::ostream& out) {
  const auto config = resolve_config(global);
  auto molecules = read_input(options.input);
  if (options.exclude) {
    const auto excluded = ingest::read_exclusion_list(*options.exclude);
    std::erase_if(molecules, [&](const ingest::Molecule& m) { return excluded.count(m.id) != 0; });
  }
  std::optional<ingest::ReferenceTable> refs;
  if (options.atomref) refs = ingest::ReferenceTable::load(*options.atomref);
  for (auto& m : molecules) ingest::normalize_targets(m, refs ? &*refs : nullptr);
  const double cutoff = options.cutoff ? *options.cutoff : config.resolved_cutoff();
  if (cutoff <= 0.0) throw UsageError("cutoff must be positive");
  const auto dataset = train::prepare_dataset(std::move(molecules), cutoff, global.threads);
  if (options.output.has_parent_path()) fs::create_directories(options.output.parent_path());
  train::save_dataset(dataset, options.output);
  const auto s = train::summarize(dataset);
  out << "dataset         " << options.output.string() << '\n'
      << "cutoff          " << cutoff << '\n'
      << "molecules       " << s.molecules << '\n'
      << "order-1 nodes   " << s.atoms << '\n'
      << "order-2 nodes   " << s.pairs << '\n'
      << "1-1 edges       " << s.atom_atom_edges << '\n'
      << "2-2 edges       " << s.pair_pair_edges << '\n'
      << "1-2 edges       " << s.atom_pair_edges << '\n'
      << "vocabulary      " << s.vocab_order1 << " order-1, " << s.vocab_order2 << " order-2\n"
      << "content hash    " << git_blob_hash_file(options.output) << '\n';
  return kSuccess;
}

int cmd_train(const GlobalOptions& global, const TrainCommandOptions& options, std::ostream& out) {
  auto config = resolve_config(global);
  if (options.out_dir) config.out_dir = *options.out_dir;
  if (options.dataset) config.dataset = *options.dataset;
  const auto started = utc_now();
  train::TrainOptions topts;
  topts.resume = options.resume;
  topts.stop_at_step = options.stop_at_step;
  topts.threads = global.threads;
  topts.log = [&](const std::string& line) { out << line << '\n' << std::flush; };
  const auto loaded = train::load_training_data(config, global.threads);
  const auto result = train::run_training(config, loaded, topts);

  json manifest;
  manifest["command"] = "train";
  manifest["config"] = json::parse(train::config_to_json(config));
  manifest["out_dir"] = config.out_dir;
  manifest["dataset"] = config.dataset;
  manifest["dataset_hash"] = loaded.dataset_hash;
  manifest["seeds"] = {{"split", config.split_seed}, {"model", config.model_seed}, {"shuffle", config.shuffle_seed}};
  manifest["artifacts"] = {{"last_checkpoint", result.last_checkpoint.string()},
                           {"best_checkpoint", result.best_checkpoint.string()},
                           {"metrics", result.metrics.string()}};
  manifest["checkpoint_hashes"] = {{"last", git_blob_hash_file(result.last_checkpoint)},
                                   {"best", git_blob_hash_file(result.best_checkpoint)}};
  manifest["result"] = {{"steps", result.steps},
                        {"early_stopped", result.early_stopped},
                        {"interrupted", result.interrupted},
                        {"step0_train_mae", result.step0_train_mae},
                        {"best_val", report_json(result.best)}};
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  std::ofstream(fs::path(config.out_dir) / "manifest.json") << manifest.dump(2) << '\n';

  out << "steps " << result.steps << (result.early_stopped ? " (early stop)" : "")
      << (result.interrupted ? " (stopped at requested step)" : "") << '\n'
      << "best val MAE " << fmt(result.best.mae_fused) << " at step " << result.best.step << '\n'
      << "checkpoints " << result.best_checkpoint.string() << ", " << result.last_checkpoint.string() << '\n';
  return kSuccess;
}

int cmd_eval(const GlobalOptions& global, const EvalOptions& options, std::ostream& out) {
  const auto meta = train::read_checkpoint_meta(options.checkpoint);
  const auto& config = meta.config;
  const std::string dataset = options.dataset ? *options.dataset : config.dataset;
  auto prepared = train::load_dataset(dataset);
  const auto data = train::make_inference_data(std::move(prepared.molecules), meta.vocabulary, meta.banks,
                                               config.target, global.threads);
  const auto split = ingest::split_dataset(static_cast<std::int64_t>(data.size()),
                                           {config.n_train, config.n_val, config.n_test, config.split_seed});
  const std::vector<std::int64_t>* indices = nullptr;
  if (options.split == "train")
    indices = &split.train;
  else if (options.split == "val")
    indices = &split.val;
  else if (options.split == "test")
    indices = &split.test;
  else
    throw UsageError("split must be train, val or test");
  const auto report = precision_for(global, config) == train::Precision::kF32
                          ? eval_checkpoint<float>(options.checkpoint, data, *indices, config.eval_batch_size,
                                                   options.split)
                          : eval_checkpoint<double>(options.checkpoint, data, *indices, config.eval_batch_size,
                                                    options.split);
  out << report_json(report).dump(2) << '\n';
  return kSuccess;
}

int cmd_predict(const GlobalOptions& global, const PredictOptions& options, std::ostream& out) {
  const auto molecules = read_input(options.input);
  std::ofstream file;
  if (options.output) {
    file.open(*options.output);
    if (!file) throw std::runtime_error("cannot write " + options.output->string());
  }
  std::ostream& dst = options.output ? file : out;
  const auto homo = predict_any(options.checkpoint, molecules, global);
  if (!options.lumo_checkpoint) {
    dst << "id,fused,order1,order2,alpha1,alpha2\n";
    for (std::size_t i = 0; i < molecules.size(); ++i) {
      const bool two = !homo.order2.empty();
      dst << molecules[i].id << ',' << fmt(homo.fused[i]) << ',' << fmt(homo.order1[i]) << ','
          << (two ? fmt(homo.order2[i]) : "nan") << ',' << fmt(homo.alpha1[i]) << ','
          << (two ? fmt(homo.alpha2[i]) : "0") << '\n';
    }
    return kSuccess;
  }
  const auto homo_target = train::read_checkpoint_meta(options.checkpoint).config.target;
  const auto lumo_target = train::read_checkpoint_meta(*options.lumo_checkpoint).config.target;
  if (homo_target != ingest::Property::kHomo || lumo_target != ingest::Property::kLumo)
    throw UsageError("gap prediction needs a homo checkpoint and a lumo checkpoint");
  const auto lumo = predict_any(*options.lumo_checkpoint, molecules, global);
  const bool two = !homo.order2.empty() && !lumo.order2.empty();
  dst << "id,gap,gap_order1,gap_order2,homo,lumo\n";
  for (std::size_t i = 0; i < molecules.size(); ++i) {
    dst << molecules[i].id << ',' << fmt(ingest::compose_gap(homo.fused[i], lumo.fused[i])) << ','
        << fmt(ingest::compose_gap(homo.order1[i], lumo.order1[i])) << ','
        << (two ? fmt(ingest::compose_gap(homo.order2[i], lumo.order2[i])) : "nan") << ',' << fmt(homo.fused[i])
        << ',' << fmt(lumo.fused[i]) << '\n';
  }
  return kSuccess;
}

int cmd_verify_counts(const VerifyCountsOptions& options, std::ostream& out) {
  if (options.n_max < 1 || options.n_max > 10) throw UsageError("--n-max must be in [1, 10]");
  if (options.max_order < 1) throw UsageError("--order must be >= 1");
  bool all_match = true;
  out << "   N   P        formula    brute-force  match\n";
  for (int p = 1; p <= options.max_order; ++p)
    for (int n = p; n <= options.n_max; ++n) {
      const auto f = graph::count_message_edges(n, p);
      const auto b = graph::count_message_edges_brute_force(n, p);
      all_match = all_match && f == b;
      out << std::setw(4) << n << std::setw(4) << p << std::setw(15) << f << std::setw(15) << b << "  "
          << (f == b ? "yes" : "NO") << '\n';
    }
  out << (all_match ? "all counts match\n" : "MISMATCH\n");
  return all_match ? kSuccess : kVerificationMismatch;
}

int cmd_bench(const GlobalOptions& global, const BenchOptions& options, std::ostream& out) {
  if (options.molecules < 0) throw UsageError("--molecules must be >= 0");
  json report;
  report["molecules"] = options.molecules;
  report["threads"] = global.threads;
  if (options.molecules == 0) {
    report["featurize_seconds"] = 0.0;
    report["inference_seconds"] = 0.0;
    out << report.dump(2) << '\n';
    if (options.report) std::ofstream(*options.report) << report.dump(2) << '\n';
    return kSuccess;
  }
  const auto meta = train::read_checkpoint_meta(options.checkpoint);
  const std::string dataset = options.dataset ? *options.dataset : meta.config.dataset;
  auto prepared = train::load_dataset(dataset);
  if (static_cast<std::int64_t>(prepared.molecules.size()) < options.molecules)
    throw UsageError("dataset has only " + std::to_string(prepared.molecules.size()) + " molecules");
  prepared.molecules.resize(static_cast<std::size_t>(options.molecules));
  double featurize = 0.0, inference = 0.0;
  predict_any(options.checkpoint, prepared.molecules, global, &featurize, &inference, options.batch_size);
  const double n = static_cast<double>(options.molecules);
  report["featurize_seconds"] = featurize;
  report["featurize_molecules_per_second"] = n / std::max(featurize, 1e-12);
  report["inference_seconds"] = inference;
  report["inference_molecules_per_second"] = n / std::max(inference, 1e-12);
  report["batch_size"] = options.batch_size;
  report["checkpoint"] = options.checkpoint.string();
  report["measured_at"] = utc_now();
  out << report.dump(2) << '\n';
  if (options.report) std::ofstream(*options.report) << report.dump(2) << '\n';
  return kSuccess;
}

}  // namespace hetmol::cli
