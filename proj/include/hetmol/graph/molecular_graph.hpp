// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hetmol/ingest/molecule.hpp"

namespace hetmol::graph {

using ingest::Vec3;

/// Dense symmetric distance matrix, row-major.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

double distance(const Vec3& a, const Vec3& b);

DistanceMatrix pairwise_distances(std::span<const Vec3> positions);

struct GraphEdge {
  int i = 0;  // i < j
  int j = 0;
  double distance = 0.0;
};

/// Atoms within a strict cutoff of each other (0 < d < c), edges sorted by
/// (i, j). Distances in Angstrom.
struct MolecularGraph {
  int n_atoms = 0;
  double cutoff = 0.0;
  std::vector<GraphEdge> edges;
};

MolecularGraph build_molecular_graph(const ingest::Molecule& molecule, double cutoff);

}  // namespace hetmol::graph
