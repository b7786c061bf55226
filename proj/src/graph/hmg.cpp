// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/graph/hmg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace hetmol::graph {

double compute_angle(const std::array<int, 2>& a, const std::array<int, 2>& b, std::span<const Vec3> positions) {
  int shared = -1;
  int shared_count = 0;
  for (int x : a)
    for (int y : b)
      if (x == y) {
        shared = x;
        ++shared_count;
      }
  if (shared_count != 1 || a[0] == a[1] || b[0] == b[1])
    throw std::invalid_argument("angle needs two pairs sharing exactly one atom");
  const int ea = a[0] == shared ? a[1] : a[0];
  const int eb = b[0] == shared ? b[1] : b[0];
  const auto& s = positions[static_cast<std::size_t>(shared)];
  const auto& pa = positions[static_cast<std::size_t>(ea)];
  const auto& pb = positions[static_cast<std::size_t>(eb)];
  const double u[3] = {pa[0] - s[0], pa[1] - s[1], pa[2] - s[2]};
  const double v[3] = {pb[0] - s[0], pb[1] - s[1], pb[2] - s[2]};
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double c = std::clamp(dot / (nu * nv), -1.0, 1.0);
  return std::acos(c);
}

namespace {

/// Sorts a directed edge list by (src, dst), permuting an attached column.
template <typename Attr>
void sort_edges(EdgeList& edges, std::vector<Attr>* attr) {
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(edges.src[x], edges.dst[x]) < std::tie(edges.src[y], edges.dst[y]);
  });
  EdgeList sorted;
  std::vector<Attr> sorted_attr;
  for (auto k : order) {
    sorted.push(edges.src[k], edges.dst[k]);
    if (attr) sorted_attr.push_back((*attr)[k]);
  }
  edges = std::move(sorted);
  if (attr) *attr = std::move(sorted_attr);
}

/// Rebuilds the edge tables from the node tables. Pairs must already be in
/// canonical sorted order.
void derive_edges(HeteroMolGraph& h, const std::vector<double>& atom_atom_distance_by_pair,
                  std::span<const Vec3> positions) {
  h.atom_atom = {};
  h.atom_atom_distance.clear();
  h.pair_pair = {};
  h.pair_pair_angle.clear();
  h.atom_pair = {};

  std::vector<std::vector<int>> incident(h.num_atoms());
  for (std::size_t p = 0; p < h.num_pairs(); ++p) {
    const auto [a, b] = h.pair_atoms[p];
    h.atom_atom.push(a, b);
    h.atom_atom.push(b, a);
    h.atom_atom_distance.push_back(atom_atom_distance_by_pair[p]);
    h.atom_atom_distance.push_back(atom_atom_distance_by_pair[p]);
    incident[static_cast<std::size_t>(a)].push_back(static_cast<int>(p));
    incident[static_cast<std::size_t>(b)].push_back(static_cast<int>(p));
    h.atom_pair.push(a, static_cast<int>(p));
    h.atom_pair.push(b, static_cast<int>(p));
  }
  sort_edges(h.atom_atom, &h.atom_atom_distance);
  sort_edges<int>(h.atom_pair, nullptr);

  for (const auto& inc : incident)
    for (int p : inc)
      for (int q : inc) {
        if (p == q) continue;
        h.pair_pair.push(p, q);
        h.pair_pair_angle.push_back(
            compute_angle(h.pair_atoms[static_cast<std::size_t>(p)], h.pair_atoms[static_cast<std::size_t>(q)],
                          positions));
      }
  sort_edges(h.pair_pair, &h.pair_pair_angle);
}

template <typename IdFn>
HeteroMolGraph build_impl(const MolecularGraph& graph, const ingest::Molecule& molecule, IdFn&& comp_id) {
  if (graph.n_atoms != static_cast<int>(molecule.atoms.size()))
    throw std::invalid_argument("molecular graph does not belong to this molecule");
  HeteroMolGraph h;
  h.n_molecules = 1;
  for (const auto& atom : molecule.atoms) {
    const int z[1] = {atom.atomic_number};
    h.atom_number.push_back(atom.atomic_number);
    h.atom_composition.push_back(comp_id(std::span<const int>(z, 1)));
    h.atom_molecule.push_back(0);
  }
  std::vector<double> lengths;
  for (const auto& e : graph.edges) {
    const int z[2] = {molecule.atoms[static_cast<std::size_t>(e.i)].atomic_number,
                      molecule.atoms[static_cast<std::size_t>(e.j)].atomic_number};
    h.pair_atoms.push_back({std::min(e.i, e.j), std::max(e.i, e.j)});
    h.pair_composition.push_back(comp_id(std::span<const int>(z, 2)));
    h.pair_length.push_back(e.distance);
    h.pair_molecule.push_back(0);
  }
  // Graph edges are produced sorted; keep the invariant even for hand-built graphs.
  std::vector<std::size_t> order(h.num_pairs());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return h.pair_atoms[x] < h.pair_atoms[y]; });
  HeteroMolGraph sorted = h;
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted.pair_atoms[k] = h.pair_atoms[order[k]];
    sorted.pair_composition[k] = h.pair_composition[order[k]];
    sorted.pair_length[k] = h.pair_length[order[k]];
  }
  const auto positions = molecule.positions();
  derive_edges(sorted, sorted.pair_length, positions);
  return sorted;
}

template <typename T>
void append(std::vector<T>& dst, const std::vector<T>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

template <typename T>
void put_vector(std::string& out, const std::vector<T>& v) {
  const std::uint64_t n = v.size();
  out.append(reinterpret_cast<const char*>(&n), sizeof n);
  out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

}  // namespace

HeteroMolGraph build_hmg(const MolecularGraph& graph, const ingest::Molecule& molecule, CompositionHash& hash) {
  return build_impl(graph, molecule, [&](std::span<const int> z) { return hash.id(z); });
}

HeteroMolGraph build_hmg_with_vocabulary(const MolecularGraph& graph, const ingest::Molecule& molecule,
                                         const CompositionHash& hash) {
  return build_impl(graph, molecule, [&](std::span<const int> z) { return hash.lookup(z); });
}

HeteroMolGraph batch_hmgs(std::span<const HeteroMolGraph* const> graphs) {
  HeteroMolGraph out;
  out.n_molecules = 0;
  int atom_offset = 0;
  int pair_offset = 0;
  for (const HeteroMolGraph* gp : graphs) {
    const auto& g = *gp;
    append(out.atom_number, g.atom_number);
    append(out.atom_composition, g.atom_composition);
    for (int m : g.atom_molecule) out.atom_molecule.push_back(m + out.n_molecules);
    append(out.pair_atoms, g.pair_atoms);
    for (std::size_t k = out.pair_atoms.size() - g.num_pairs(); k < out.pair_atoms.size(); ++k) {
      out.pair_atoms[k][0] += atom_offset;
      out.pair_atoms[k][1] += atom_offset;
    }
    append(out.pair_composition, g.pair_composition);
    append(out.pair_length, g.pair_length);
    for (int m : g.pair_molecule) out.pair_molecule.push_back(m + out.n_molecules);
    for (std::size_t e = 0; e < g.atom_atom.size(); ++e)
      out.atom_atom.push(g.atom_atom.src[e] + atom_offset, g.atom_atom.dst[e] + atom_offset);
    append(out.atom_atom_distance, g.atom_atom_distance);
    for (std::size_t e = 0; e < g.pair_pair.size(); ++e)
      out.pair_pair.push(g.pair_pair.src[e] + pair_offset, g.pair_pair.dst[e] + pair_offset);
    append(out.pair_pair_angle, g.pair_pair_angle);
    for (std::size_t e = 0; e < g.atom_pair.size(); ++e)
      out.atom_pair.push(g.atom_pair.src[e] + atom_offset, g.atom_pair.dst[e] + pair_offset);
    atom_offset += static_cast<int>(g.num_atoms());
    pair_offset += static_cast<int>(g.num_pairs());
    out.n_molecules += g.n_molecules;
  }
  return out;
}

HeteroMolGraph batch_hmgs(std::span<const HeteroMolGraph> graphs) {
  std::vector<const HeteroMolGraph*> ptrs;
  for (const auto& g : graphs) ptrs.push_back(&g);
  return batch_hmgs(std::span<const HeteroMolGraph* const>(ptrs));
}

HeteroMolGraph relabel_atoms(const HeteroMolGraph& hmg, std::span<const int> perm) {
  const auto n = hmg.num_atoms();
  if (perm.size() != n) throw std::invalid_argument("permutation size does not match atom count");
  HeteroMolGraph out;
  out.n_molecules = hmg.n_molecules;
  out.atom_number.resize(n);
  out.atom_composition.resize(n);
  out.atom_molecule.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ni = static_cast<std::size_t>(perm[i]);
    out.atom_number[ni] = hmg.atom_number[i];
    out.atom_composition[ni] = hmg.atom_composition[i];
    out.atom_molecule[ni] = hmg.atom_molecule[i];
  }
  // New pair order: sort relabeled pairs canonically.
  std::vector<std::array<int, 2>> mapped(hmg.num_pairs());
  for (std::size_t p = 0; p < mapped.size(); ++p) {
    const int a = perm[static_cast<std::size_t>(hmg.pair_atoms[p][0])];
    const int b = perm[static_cast<std::size_t>(hmg.pair_atoms[p][1])];
    mapped[p] = {std::min(a, b), std::max(a, b)};
  }
  std::vector<std::size_t> order(mapped.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return mapped[x] < mapped[y]; });
  std::vector<int> new_pair_index(mapped.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    new_pair_index[order[k]] = static_cast<int>(k);
    out.pair_atoms.push_back(mapped[order[k]]);
    out.pair_composition.push_back(hmg.pair_composition[order[k]]);
    out.pair_length.push_back(hmg.pair_length[order[k]]);
    out.pair_molecule.push_back(hmg.pair_molecule[order[k]]);
  }
  for (std::size_t e = 0; e < hmg.atom_atom.size(); ++e) {
    out.atom_atom.push(perm[static_cast<std::size_t>(hmg.atom_atom.src[e])],
                       perm[static_cast<std::size_t>(hmg.atom_atom.dst[e])]);
    out.atom_atom_distance.push_back(hmg.atom_atom_distance[e]);
  }
  sort_edges(out.atom_atom, &out.atom_atom_distance);
  for (std::size_t e = 0; e < hmg.pair_pair.size(); ++e) {
    out.pair_pair.push(new_pair_index[static_cast<std::size_t>(hmg.pair_pair.src[e])],
                       new_pair_index[static_cast<std::size_t>(hmg.pair_pair.dst[e])]);
    out.pair_pair_angle.push_back(hmg.pair_pair_angle[e]);
  }
  sort_edges(out.pair_pair, &out.pair_pair_angle);
  for (std::size_t e = 0; e < hmg.atom_pair.size(); ++e)
    out.atom_pair.push(perm[static_cast<std::size_t>(hmg.atom_pair.src[e])],
                       new_pair_index[static_cast<std::size_t>(hmg.atom_pair.dst[e])]);
  sort_edges<int>(out.atom_pair, nullptr);
  return out;
}

std::string canonical_serialization(const HeteroMolGraph& hmg) {
  std::string out;
  const std::int64_t nm = hmg.n_molecules;
  out.append(reinterpret_cast<const char*>(&nm), sizeof nm);
  put_vector(out, hmg.atom_number);
  put_vector(out, hmg.atom_composition);
  put_vector(out, hmg.atom_molecule);
  put_vector(out, hmg.pair_atoms);
  put_vector(out, hmg.pair_composition);
  put_vector(out, hmg.pair_length);
  put_vector(out, hmg.pair_molecule);
  put_vector(out, hmg.atom_atom.src);
  put_vector(out, hmg.atom_atom.dst);
  put_vector(out, hmg.atom_atom_distance);
  put_vector(out, hmg.pair_pair.src);
  put_vector(out, hmg.pair_pair.dst);
  put_vector(out, hmg.pair_pair_angle);
  put_vector(out, hmg.atom_pair.src);
  put_vector(out, hmg.atom_pair.dst);
  return out;
}

}  // namespace hetmol::graph
