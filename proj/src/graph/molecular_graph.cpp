// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/graph/molecular_graph.hpp"

#include <cmath>
#include <stdexcept>

namespace hetmol::graph {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

DistanceMatrix pairwise_distances(std::span<const Vec3> positions) {
  DistanceMatrix d(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j) d(i, j) = d(j, i) = distance(positions[i], positions[j]);
  return d;
}

MolecularGraph build_molecular_graph(const ingest::Molecule& molecule, double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be positive");
  MolecularGraph g;
  g.n_atoms = static_cast<int>(molecule.atoms.size());
  g.cutoff = cutoff;
  const auto pos = molecule.positions();
  const auto d = pairwise_distances(pos);
  for (int i = 0; i < g.n_atoms; ++i)
    for (int j = i + 1; j < g.n_atoms; ++j) {
      const double dij = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (dij > 0.0 && dij < cutoff) g.edges.push_back({i, j, dij});
    }
  return g;
}

}  // namespace hetmol::graph
