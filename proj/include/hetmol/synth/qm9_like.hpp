// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "hetmol/ingest/molecule.hpp"
#include "hetmol/ingest/reference.hpp"

namespace hetmol::synth {

/// The per-element reference energies published with QM9 (Hartree; Cv in
/// cal/mol K) for H, C, N, O and F.
ingest::ReferenceTable qm9_atomrefs();

struct GeneratorOptions {
  int min_heavy_atoms = 1;
  int max_heavy_atoms = 6;
};

/// Random small organic-like molecules over H, C, N, O and F with all twelve
/// targets in raw QM9 units.
///
/// Heavy atoms form a random tree respecting valences (C 4, N 3, O 2, F 1)
/// with bond lengths from covalent radii; free valences are filled with
/// hydrogens and geometries with clashing atoms are redrawn. Targets are
/// smooth functions of the geometry: U0 is the atom-reference sum plus Morse
/// pair energies tapered to zero at 3 Angstrom plus a bond-angle strain
/// term, and the other properties are simple invariant functions of the
/// same structure. Deterministic in `seed`.
std::vector<ingest::Molecule> generate_molecules(std::size_t count, std::uint64_t seed,
                                                 const GeneratorOptions& options = {});

}  // namespace hetmol::synth
