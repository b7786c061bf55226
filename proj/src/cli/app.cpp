// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "hetmol/cli/commands.hpp"
#include "hetmol/graph/composition.hpp"
#include "hetmol/ingest/xyz.hpp"
#include "hetmol/train/trainer.hpp"

namespace hetmol::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneous molecular graph networks for molecular property prediction", "hetmol"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string precision;
  app.add_option("--config", config_path, "JSON training config");
  app.add_option("--seed", seed, "base seed for split, model and shuffle");
  app.add_option("--threads", global.threads, "worker threads for graph building and featurization")
      ->check(CLI::PositiveNumber);
  app.add_option("--precision", precision, "f32 or f64")->check(CLI::IsMember({"f32", "f64"}));

  PrepareOptions prep;
  std::string input, output, atomref, exclude;
  double cutoff = 0.0;
  auto* prepare = app.add_subcommand("prepare", "parse XYZ records and write a dataset cache");
  prepare->add_option("--input", input, "XYZ file, gzip file or directory")->required();
  prepare->add_option("--out", output, "dataset cache to write")->required();
  prepare->add_option("--cutoff", cutoff, "cutoff in Angstrom (default: from the config target)");
  prepare->add_option("--atomref", atomref, "per-element reference table to subtract");
  prepare->add_option("--exclude", exclude, "file of record ids to drop");

  TrainCommandOptions tr;
  std::string out_dir, dataset;
  std::int64_t stop_at = -1;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_flag("--resume", tr.resume, "continue from <out_dir>/last.ckpt");
  train_cmd->add_option("--stop-at-step", stop_at, "stop after this many steps and write last.ckpt");
  train_cmd->add_option("--out-dir", out_dir, "override the config out_dir");
  train_cmd->add_option("--dataset", dataset, "override the config dataset");

  EvalOptions ev;
  std::string ev_ckpt, ev_dataset;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval_cmd->add_option("--checkpoint", ev_ckpt)->required();
  eval_cmd->add_option("--split", ev.split)->check(CLI::IsMember({"train", "val", "test"}));
  eval_cmd->add_option("--dataset", ev_dataset, "dataset cache (default: the one trained on)");

  PredictOptions pr;
  std::string pr_ckpt, pr_lumo, pr_input, pr_output;
  auto* predict = app.add_subcommand("predict", "predict properties for XYZ input");
  predict->add_option("--checkpoint", pr_ckpt)->required();
  predict->add_option("--lumo-checkpoint", pr_lumo, "with a homo checkpoint, predict the gap as lumo - homo");
  predict->add_option("--input", pr_input)->required();
  predict->add_option("--output", pr_output, "CSV file (default: standard output)");

  VerifyCountsOptions vc;
  auto* verify = app.add_subcommand("verify-counts", "compare the message-count formula with brute force");
  verify->add_option("--n-max", vc.n_max, "largest complete graph, at most 10");
  verify->add_option("--order", vc.max_order, "largest many-body order");

  BenchOptions bo;
  std::string bench_ckpt, bench_dataset, bench_report;
  auto* bench = app.add_subcommand("bench", "measure featurization and inference throughput");
  bench->add_option("--checkpoint", bench_ckpt)->required();
  bench->add_option("--dataset", bench_dataset, "dataset cache (default: the one trained on)");
  bench->add_option("--molecules", bo.molecules, "number of molecules");
  bench->add_option("--batch-size", bo.batch_size)->check(CLI::PositiveNumber);
  bench->add_option("--report", bench_report, "also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  if (!config_path.empty()) global.config = config_path;
  if (app.count("--seed")) global.seed = seed;
  if (!precision.empty()) global.precision = precision;

  try {
    if (*prepare) {
      prep.input = input;
      prep.output = output;
      if (prepare->count("--cutoff")) prep.cutoff = cutoff;
      if (!atomref.empty()) prep.atomref = atomref;
      if (!exclude.empty()) prep.exclude = exclude;
      return cmd_prepare(global, prep, out);
    }
    if (*train_cmd) {
      if (stop_at >= 0) tr.stop_at_step = stop_at;
      if (!out_dir.empty()) tr.out_dir = out_dir;
      if (!dataset.empty()) tr.dataset = dataset;
      return cmd_train(global, tr, out);
    }
    if (*eval_cmd) {
      ev.checkpoint = ev_ckpt;
      if (!ev_dataset.empty()) ev.dataset = ev_dataset;
      return cmd_eval(global, ev, out);
    }
    if (*predict) {
      pr.checkpoint = pr_ckpt;
      pr.input = pr_input;
      if (!pr_lumo.empty()) pr.lumo_checkpoint = pr_lumo;
      if (!pr_output.empty()) pr.output = pr_output;
      return cmd_predict(global, pr, out);
    }
    if (*verify) return cmd_verify_counts(vc, out);
    if (*bench) {
      bo.checkpoint = bench_ckpt;
      if (!bench_dataset.empty()) bo.dataset = bench_dataset;
      if (!bench_report.empty()) bo.report = bench_report;
      return cmd_bench(global, bo, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const train::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ingest::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const graph::UnknownCompositionError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace hetmol::cli
