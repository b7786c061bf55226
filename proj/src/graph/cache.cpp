// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/graph/cache.hpp"

namespace hetmol::graph {

void write_vocabulary(io::Archive& archive, const CompositionHash& hash) {
  for (int order = 1; order <= CompositionHash::kMaxOrder; ++order) {
    std::vector<std::int64_t> flat;
    for (const auto& e : hash.entries(order)) flat.insert(flat.end(), e.begin(), e.end());
    archive.put_i64("vocab/order" + std::to_string(order), {hash.size(order), order}, flat);
  }
}

CompositionHash read_vocabulary(const io::Archive& archive) {
  std::vector<std::vector<int>> entries[2];
  for (int order = 1; order <= 2; ++order) {
    const auto& a = archive.get("vocab/order" + std::to_string(order));
    if (a.dtype != io::DType::kInt64 || a.shape.size() != 2 || a.shape[1] != order)
      throw io::ArchiveError("vocab/order" + std::to_string(order) + " has an unexpected shape");
    for (std::int64_t r = 0; r < a.shape[0]; ++r) {
      std::vector<int> e;
      for (int c = 0; c < order; ++c) e.push_back(static_cast<int>(a.i64[static_cast<std::size_t>(r * order + c)]));
      entries[order - 1].push_back(std::move(e));
    }
  }
  return CompositionHash::from_entries(entries[0], entries[1]);
}

void write_hmgs(io::Archive& archive, const std::vector<HeteroMolGraph>& graphs) {
  std::vector<std::int64_t> counts, atom_number, atom_comp, pair_atoms, pair_comp, e11, e22, e12;
  std::vector<double> pair_length, e11_dist, e22_angle;
  for (const auto& g : graphs) {
    if (g.n_molecules != 1) throw std::invalid_argument("write_hmgs expects single-molecule graphs");
    counts.insert(counts.end(), {static_cast<std::int64_t>(g.num_atoms()), static_cast<std::int64_t>(g.num_pairs()),
                                 static_cast<std::int64_t>(g.atom_atom.size()),
                                 static_cast<std::int64_t>(g.pair_pair.size()),
                                 static_cast<std::int64_t>(g.atom_pair.size())});
    atom_number.insert(atom_number.end(), g.atom_number.begin(), g.atom_number.end());
    atom_comp.insert(atom_comp.end(), g.atom_composition.begin(), g.atom_composition.end());
    for (const auto& p : g.pair_atoms) pair_atoms.insert(pair_atoms.end(), {p[0], p[1]});
    pair_comp.insert(pair_comp.end(), g.pair_composition.begin(), g.pair_composition.end());
    pair_length.insert(pair_length.end(), g.pair_length.begin(), g.pair_length.end());
    for (std::size_t e = 0; e < g.atom_atom.size(); ++e) e11.insert(e11.end(), {g.atom_atom.src[e], g.atom_atom.dst[e]});
    e11_dist.insert(e11_dist.end(), g.atom_atom_distance.begin(), g.atom_atom_distance.end());
    for (std::size_t e = 0; e < g.pair_pair.size(); ++e) e22.insert(e22.end(), {g.pair_pair.src[e], g.pair_pair.dst[e]});
    e22_angle.insert(e22_angle.end(), g.pair_pair_angle.begin(), g.pair_pair_angle.end());
    for (std::size_t e = 0; e < g.atom_pair.size(); ++e) e12.insert(e12.end(), {g.atom_pair.src[e], g.atom_pair.dst[e]});
  }
  const auto n = static_cast<std::int64_t>(graphs.size());
  auto len = [](const auto& v) { return static_cast<std::int64_t>(v.size()); };
  archive.put_i64("hmg/counts", {n, 5}, counts);
  archive.put_i64("hmg/atom_number", {len(atom_number)}, atom_number);
  archive.put_i64("hmg/atom_composition", {len(atom_comp)}, atom_comp);
  archive.put_i64("hmg/pair_atoms", {len(pair_comp), 2}, pair_atoms);
  archive.put_i64("hmg/pair_composition", {len(pair_comp)}, pair_comp);
  archive.put_f64("hmg/pair_length", {len(pair_length)}, pair_length);
  archive.put_i64("hmg/atom_atom", {len(e11_dist), 2}, e11);
  archive.put_f64("hmg/atom_atom_distance", {len(e11_dist)}, e11_dist);
  archive.put_i64("hmg/pair_pair", {len(e22_angle), 2}, e22);
  archive.put_f64("hmg/pair_pair_angle", {len(e22_angle)}, e22_angle);
  archive.put_i64("hmg/atom_pair", {len(e12) / 2, 2}, e12);
}

std::vector<HeteroMolGraph> read_hmgs(const io::Archive& archive) {
  const auto& counts_arr = archive.get("hmg/counts");
  if (counts_arr.shape.size() != 2 || counts_arr.shape[1] != 5) throw io::ArchiveError("hmg/counts has bad shape");
  const auto n = counts_arr.shape[0];
  const auto& counts = archive.i64("hmg/counts");
  const auto& atom_number = archive.i64("hmg/atom_number");
  const auto& atom_comp = archive.i64("hmg/atom_composition");
  const auto& pair_atoms = archive.i64("hmg/pair_atoms");
  const auto& pair_comp = archive.i64("hmg/pair_composition");
  const auto& pair_length = archive.f64("hmg/pair_length");
  const auto& e11 = archive.i64("hmg/atom_atom");
  const auto& e11_dist = archive.f64("hmg/atom_atom_distance");
  const auto& e22 = archive.i64("hmg/pair_pair");
  const auto& e22_angle = archive.f64("hmg/pair_pair_angle");
  const auto& e12 = archive.i64("hmg/atom_pair");

  std::vector<HeteroMolGraph> out(static_cast<std::size_t>(n));
  std::size_t ia = 0, ip = 0, i11 = 0, i22 = 0, i12 = 0;
  for (std::int64_t m = 0; m < n; ++m) {
    auto& g = out[static_cast<std::size_t>(m)];
    const auto* c = &counts[static_cast<std::size_t>(m * 5)];
    for (std::int64_t k = 0; k < c[0]; ++k, ++ia) {
      g.atom_number.push_back(static_cast<int>(atom_number.at(ia)));
      g.atom_composition.push_back(static_cast<int>(atom_comp.at(ia)));
      g.atom_molecule.push_back(0);
    }
    for (std::int64_t k = 0; k < c[1]; ++k, ++ip) {
      g.pair_atoms.push_back({static_cast<int>(pair_atoms.at(2 * ip)), static_cast<int>(pair_atoms.at(2 * ip + 1))});
      g.pair_composition.push_back(static_cast<int>(pair_comp.at(ip)));
      g.pair_length.push_back(pair_length.at(ip));
      g.pair_molecule.push_back(0);
    }
    for (std::int64_t k = 0; k < c[2]; ++k, ++i11) {
      g.atom_atom.push(static_cast<int>(e11.at(2 * i11)), static_cast<int>(e11.at(2 * i11 + 1)));
      g.atom_atom_distance.push_back(e11_dist.at(i11));
    }
    for (std::int64_t k = 0; k < c[3]; ++k, ++i22) {
      g.pair_pair.push(static_cast<int>(e22.at(2 * i22)), static_cast<int>(e22.at(2 * i22 + 1)));
      g.pair_pair_angle.push_back(e22_angle.at(i22));
    }
    for (std::int64_t k = 0; k < c[4]; ++k, ++i12)
      g.atom_pair.push(static_cast<int>(e12.at(2 * i12)), static_cast<int>(e12.at(2 * i12 + 1)));
  }
  return out;
}

}  // namespace hetmol::graph
