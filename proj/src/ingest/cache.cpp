// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/cache.hpp"

#include <cmath>
#include <limits>

namespace hetmol::ingest {

void write_molecules(io::Archive& archive, const std::vector<Molecule>& molecules) {
  const auto n = static_cast<std::int64_t>(molecules.size());
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int64_t> numbers;
  std::vector<double> coords;
  std::vector<double> targets;
  std::string ids;
  for (const auto& m : molecules) {
    for (const auto& a : m.atoms) {
      numbers.push_back(a.atomic_number);
      coords.insert(coords.end(), a.position.begin(), a.position.end());
    }
    offsets.push_back(static_cast<std::int64_t>(numbers.size()));
    for (Property p : kAllProperties) {
      auto it = m.targets.find(p);
      targets.push_back(it == m.targets.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
    }
    ids += m.id;
    ids += '\n';
  }
  const auto n_atoms = static_cast<std::int64_t>(numbers.size());
  archive.put_i64("molecules/atom_offsets", {n + 1}, offsets);
  archive.put_i64("molecules/atomic_numbers", {n_atoms}, numbers);
  archive.put_f64("molecules/positions", {n_atoms, 3}, coords);
  archive.put_f64("molecules/targets", {n, 12}, targets);
  archive.put_bytes("molecules/ids", ids);
}

std::vector<Molecule> read_molecules(const io::Archive& archive) {
  const auto& offsets = archive.i64("molecules/atom_offsets");
  if (offsets.empty()) throw io::ArchiveError("molecules/atom_offsets is empty");
  const auto n = static_cast<std::int64_t>(offsets.size()) - 1;
  const auto n_atoms = offsets.back();
  const auto& numbers = archive.i64("molecules/atomic_numbers", {n_atoms});
  const auto& coords = archive.f64("molecules/positions", {n_atoms, 3});
  const auto& targets = archive.f64("molecules/targets", {n, 12});
  const auto& ids = archive.bytes("molecules/ids");

  std::vector<Molecule> out(static_cast<std::size_t>(n));
  std::size_t id_pos = 0;
  for (std::int64_t m = 0; m < n; ++m) {
    auto& mol = out[static_cast<std::size_t>(m)];
    const auto nl = ids.find('\n', id_pos);
    if (nl == std::string::npos) throw io::ArchiveError("molecules/ids has too few entries");
    mol.id = ids.substr(id_pos, nl - id_pos);
    id_pos = nl + 1;
    for (auto a = offsets[static_cast<std::size_t>(m)]; a < offsets[static_cast<std::size_t>(m) + 1]; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      mol.atoms.push_back({static_cast<int>(numbers[ai]), {coords[3 * ai], coords[3 * ai + 1], coords[3 * ai + 2]}});
    }
    for (std::size_t k = 0; k < 12; ++k) {
      const double v = targets[static_cast<std::size_t>(m) * 12 + k];
      if (!std::isnan(v)) mol.targets[kAllProperties[k]] = v;
    }
  }
  return out;
}

}  // namespace hetmol::ingest
