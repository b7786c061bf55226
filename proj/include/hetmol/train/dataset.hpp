// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hetmol/featurize/rbf.hpp"
#include "hetmol/graph/composition.hpp"
#include "hetmol/graph/hmg.hpp"
#include "hetmol/ingest/molecule.hpp"
#include "hetmol/model/hmgnn.hpp"

namespace hetmol::train {

/// Parsed molecules with their composition vocabulary and HMGs at one
/// cutoff. This is the content of a dataset cache file.
struct PreparedDataset {
  std::vector<ingest::Molecule> molecules;
  graph::CompositionHash vocabulary;
  std::vector<graph::HeteroMolGraph> graphs;
  double cutoff = 0.0;
};

struct DatasetSummary {
  std::int64_t molecules = 0;
  std::int64_t atoms = 0;
  std::int64_t pairs = 0;
  std::int64_t atom_atom_edges = 0;  // directed
  std::int64_t pair_pair_edges = 0;  // directed
  std::int64_t atom_pair_edges = 0;
  int vocab_order1 = 0;
  int vocab_order2 = 0;
};

/// Builds graphs and allocates composition ids in molecule order.
/// `threads` > 1 builds molecular graphs concurrently; ids are still
/// allocated sequentially, so the result does not depend on it.
PreparedDataset prepare_dataset(std::vector<ingest::Molecule> molecules, double cutoff, int threads = 1);

inline constexpr const char* kDatasetKind = "hetmol-dataset";
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const PreparedDataset& dataset, const std::filesystem::path& path);
PreparedDataset load_dataset(const std::filesystem::path& path);

DatasetSummary summarize(const PreparedDataset& dataset);

/// Graphs, features and one target per molecule, consistent with a fixed
/// vocabulary and feature banks.
struct TrainingData {
  std::vector<ingest::Molecule> molecules;
  graph::CompositionHash vocabulary;
  featurize::FeatureBanks banks;
  std::vector<graph::HeteroMolGraph> graphs;
  std::vector<featurize::FeatureTables> features;
  std::vector<double> targets;  // NaN when the molecule lacks the target

  std::size_t size() const { return molecules.size(); }
};

/// Training-side view: keeps the dataset vocabulary and extends it if the
/// banks' cutoff differs from the cached one and new pairs appear.
TrainingData make_training_data(PreparedDataset dataset, const featurize::FeatureBanks& banks,
                                ingest::Property target, int threads = 1);

/// Inference-side view against a fixed vocabulary (from a checkpoint).
/// Throws graph::UnknownCompositionError for unseen compositions.
TrainingData make_inference_data(std::vector<ingest::Molecule> molecules, const graph::CompositionHash& vocabulary,
                                 const featurize::FeatureBanks& banks, ingest::Property target, int threads = 1);

/// Batch of the given molecules, in the given order.
model::Batch gather_batch(const TrainingData& data, std::span<const std::int64_t> indices);

/// Targets of the given molecules; throws std::runtime_error naming a
/// molecule without the target.
std::vector<double> gather_targets(const TrainingData& data, std::span<const std::int64_t> indices);

}  // namespace hetmol::train
