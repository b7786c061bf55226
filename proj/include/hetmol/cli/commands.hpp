// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hetmol/train/config.hpp"

namespace hetmol::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2, kVerificationMismatch = 3 };

/// Errors in how a command was invoked (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flags accepted by every subcommand.
struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<std::string> precision;
};

/// Config from --config (or defaults) with --seed and --precision applied.
/// --seed s sets split_seed = s, model_seed = s + 1, shuffle_seed = s + 2.
train::TrainConfig resolve_config(const GlobalOptions& global);

struct PrepareOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> cutoff;  // else from the config target
  std::optional<std::filesystem::path> atomref;
  std::optional<std::filesystem::path> exclude;
};
int cmd_prepare(const GlobalOptions& global, const PrepareOptions& options, std::ostream& out);

struct TrainCommandOptions {
  bool resume = false;
  std::optional<std::int64_t> stop_at_step;
  std::optional<std::string> out_dir;
  std::optional<std::string> dataset;
};
int cmd_train(const GlobalOptions& global, const TrainCommandOptions& options, std::ostream& out);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::string split = "test";
  std::optional<std::string> dataset;  // else the dataset named in the checkpoint
};
int cmd_eval(const GlobalOptions& global, const EvalOptions& options, std::ostream& out);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::optional<std::filesystem::path> lumo_checkpoint;
  std::filesystem::path input;
  std::optional<std::filesystem::path> output;
};
int cmd_predict(const GlobalOptions& global, const PredictOptions& options, std::ostream& out);

struct VerifyCountsOptions {
  int n_max = 8;
  int max_order = 2;
};
int cmd_verify_counts(const VerifyCountsOptions& options, std::ostream& out);

struct BenchOptions {
  std::filesystem::path checkpoint;
  std::optional<std::string> dataset;
  std::int64_t molecules = 1000;
  std::int64_t batch_size = 256;
  std::optional<std::filesystem::path> report;
};
int cmd_bench(const GlobalOptions& global, const BenchOptions& options, std::ostream& out);

/// Parses argv and dispatches; returns the process exit code. Errors are
/// printed to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetmol::cli
