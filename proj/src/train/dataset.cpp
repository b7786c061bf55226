// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/dataset.hpp"

#include <cmath>
#include <functional>
#include <thread>

#include "hetmol/graph/cache.hpp"
#include "hetmol/graph/molecular_graph.hpp"
#include "hetmol/ingest/cache.hpp"

namespace hetmol::train {

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers with a static
// interleaved assignment.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<graph::MolecularGraph> molecular_graphs(const std::vector<ingest::Molecule>& molecules, double cutoff,
                                                    int threads) {
  std::vector<graph::MolecularGraph> out(molecules.size());
  parallel_for(molecules.size(), threads,
               [&](std::size_t i) { out[i] = graph::build_molecular_graph(molecules[i], cutoff); });
  return out;
}

std::vector<featurize::FeatureTables> featurize_all(const std::vector<graph::HeteroMolGraph>& graphs,
                                                    const featurize::FeatureBanks& banks, int threads) {
  std::vector<featurize::FeatureTables> out(graphs.size());
  parallel_for(graphs.size(), threads, [&](std::size_t i) { out[i] = featurize::featurize_hmg(graphs[i], banks); });
  return out;
}

std::vector<double> targets_of(const std::vector<ingest::Molecule>& molecules, ingest::Property target) {
  std::vector<double> out;
  out.reserve(molecules.size());
  for (const auto& m : molecules) {
    auto it = m.targets.find(target);
    out.push_back(it == m.targets.end() ? std::nan("") : it->second);
  }
  return out;
}

}  // namespace

PreparedDataset prepare_dataset(std::vector<ingest::Molecule> molecules, double cutoff, int threads) {
  PreparedDataset ds;
  ds.cutoff = cutoff;
  const auto mgs = molecular_graphs(molecules, cutoff, threads);
  ds.graphs.reserve(molecules.size());
  for (std::size_t i = 0; i < molecules.size(); ++i)
    ds.graphs.push_back(graph::build_hmg(mgs[i], molecules[i], ds.vocabulary));
  ds.molecules = std::move(molecules);
  return ds;
}

void save_dataset(const PreparedDataset& dataset, const std::filesystem::path& path) {
  io::Archive archive(kDatasetKind, kDatasetVersion);
  ingest::write_molecules(archive, dataset.molecules);
  graph::write_vocabulary(archive, dataset.vocabulary);
  graph::write_hmgs(archive, dataset.graphs);
  archive.put_scalar("meta/cutoff", dataset.cutoff);
  archive.save(path);
}

PreparedDataset load_dataset(const std::filesystem::path& path) {
  const auto archive = io::Archive::load(path, kDatasetKind, kDatasetVersion);
  PreparedDataset ds;
  ds.molecules = ingest::read_molecules(archive);
  ds.vocabulary = graph::read_vocabulary(archive);
  ds.graphs = graph::read_hmgs(archive);
  ds.cutoff = archive.scalar_f64("meta/cutoff");
  if (ds.graphs.size() != ds.molecules.size())
    throw io::ArchiveError("dataset cache holds " + std::to_string(ds.molecules.size()) + " molecules but " +
                           std::to_string(ds.graphs.size()) + " graphs");
  return ds;
}

DatasetSummary summarize(const PreparedDataset& dataset) {
  DatasetSummary s;
  s.molecules = static_cast<std::int64_t>(dataset.molecules.size());
  for (const auto& g : dataset.graphs) {
    s.atoms += static_cast<std::int64_t>(g.num_atoms());
    s.pairs += static_cast<std::int64_t>(g.num_pairs());
    s.atom_atom_edges += static_cast<std::int64_t>(g.atom_atom.size());
    s.pair_pair_edges += static_cast<std::int64_t>(g.pair_pair.size());
    s.atom_pair_edges += static_cast<std::int64_t>(g.atom_pair.size());
  }
  s.vocab_order1 = dataset.vocabulary.size(1);
  s.vocab_order2 = dataset.vocabulary.size(2);
  return s;
}

TrainingData make_training_data(PreparedDataset dataset, const featurize::FeatureBanks& banks,
                                ingest::Property target, int threads) {
  TrainingData data;
  data.vocabulary = std::move(dataset.vocabulary);
  data.banks = banks;
  if (dataset.cutoff == banks.cutoff) {
    data.graphs = std::move(dataset.graphs);
  } else {
    const auto mgs = molecular_graphs(dataset.molecules, banks.cutoff, threads);
    data.graphs.reserve(mgs.size());
    for (std::size_t i = 0; i < mgs.size(); ++i)
      data.graphs.push_back(graph::build_hmg(mgs[i], dataset.molecules[i], data.vocabulary));
  }
  data.molecules = std::move(dataset.molecules);
  data.features = featurize_all(data.graphs, banks, threads);
  data.targets = targets_of(data.molecules, target);
  return data;
}

TrainingData make_inference_data(std::vector<ingest::Molecule> molecules, const graph::CompositionHash& vocabulary,
                                 const featurize::FeatureBanks& banks, ingest::Property target, int threads) {
  TrainingData data;
  data.vocabulary = vocabulary;
  data.banks = banks;
  const auto mgs = molecular_graphs(molecules, banks.cutoff, threads);
  data.graphs.resize(mgs.size());
  parallel_for(mgs.size(), threads, [&](std::size_t i) {
    data.graphs[i] = graph::build_hmg_with_vocabulary(mgs[i], molecules[i], data.vocabulary);
  });
  data.molecules = std::move(molecules);
  data.features = featurize_all(data.graphs, banks, threads);
  data.targets = targets_of(data.molecules, target);
  return data;
}

model::Batch gather_batch(const TrainingData& data, std::span<const std::int64_t> indices) {
  std::vector<const graph::HeteroMolGraph*> graphs;
  std::vector<const featurize::FeatureTables*> features;
  graphs.reserve(indices.size());
  features.reserve(indices.size());
  for (auto i : indices) {
    graphs.push_back(&data.graphs.at(static_cast<std::size_t>(i)));
    features.push_back(&data.features.at(static_cast<std::size_t>(i)));
  }
  return model::make_batch(graphs, features);
}

std::vector<double> gather_targets(const TrainingData& data, std::span<const std::int64_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    const double y = data.targets.at(static_cast<std::size_t>(i));
    if (std::isnan(y))
      throw std::runtime_error("molecule '" + data.molecules[static_cast<std::size_t>(i)].id +
                               "' has no value for the training target");
    out.push_back(y);
  }
  return out;
}

}  // namespace hetmol::train
