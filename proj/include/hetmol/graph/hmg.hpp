// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hetmol/graph/composition.hpp"
#include "hetmol/graph/molecular_graph.hpp"

namespace hetmol::graph {

/// Directed edge list. Symmetric relations store both directions.
struct EdgeList {
  std::vector<int> src;
  std::vector<int> dst;

  std::size_t size() const { return src.size(); }
  void push(int s, int d) {
    src.push_back(s);
    dst.push_back(d);
  }
};

/// Heterogeneous molecular graph for orders 1 (atoms) and 2 (atom pairs
/// within the cutoff). A batch is the disjoint union of several molecules;
/// the *_molecule vectors map every node to its molecule.
struct HeteroMolGraph {
  int n_molecules = 1;

  std::vector<int> atom_number;
  std::vector<int> atom_composition;
  std::vector<int> atom_molecule;

  std::vector<std::array<int, 2>> pair_atoms;  // canonical a < b
  std::vector<int> pair_composition;
  std::vector<double> pair_length;
  std::vector<int> pair_molecule;

  EdgeList atom_atom;  // molecular-graph edges, both directions, sorted (src, dst)
  std::vector<double> atom_atom_distance;

  EdgeList pair_pair;  // pairs sharing exactly one atom, both directions, sorted (src, dst)
  std::vector<double> pair_pair_angle;

  EdgeList atom_pair;  // src = atom, dst = pair containing it, sorted (atom, pair)

  std::size_t num_atoms() const { return atom_number.size(); }
  std::size_t num_pairs() const { return pair_atoms.size(); }
};

/// Angle in [0, pi] at the atom shared by two pairs. Throws
/// std::invalid_argument unless the pairs share exactly one atom.
double compute_angle(const std::array<int, 2>& a, const std::array<int, 2>& b, std::span<const Vec3> positions);

/// Builds the HMG, allocating composition ids for unseen multisets.
HeteroMolGraph build_hmg(const MolecularGraph& graph, const ingest::Molecule& molecule, CompositionHash& hash);

/// Builds the HMG against a fixed vocabulary; unseen multisets throw
/// UnknownCompositionError.
HeteroMolGraph build_hmg_with_vocabulary(const MolecularGraph& graph, const ingest::Molecule& molecule,
                                         const CompositionHash& hash);

/// Disjoint union; node indices are offset per order and molecule ids are
/// renumbered consecutively.
HeteroMolGraph batch_hmgs(std::span<const HeteroMolGraph> graphs);
HeteroMolGraph batch_hmgs(std::span<const HeteroMolGraph* const> graphs);

/// Applies an atom relabeling (new index of atom i is perm[i]) and returns
/// the HMG rebuilt in canonical order.
HeteroMolGraph relabel_atoms(const HeteroMolGraph& hmg, std::span<const int> perm);

/// Byte string of every table in canonical order; equal strings mean equal
/// graphs bit for bit.
std::string canonical_serialization(const HeteroMolGraph& hmg);

}  // namespace hetmol::graph
