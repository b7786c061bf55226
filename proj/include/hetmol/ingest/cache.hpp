// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hetmol/common/archive.hpp"
#include "hetmol/ingest/molecule.hpp"

namespace hetmol::ingest {

/// Writes molecules as named arrays under "molecules/": atom offsets, atomic
/// numbers, coordinates, a (n, 12) target matrix with NaN for absent values,
/// and newline-joined ids.
void write_molecules(io::Archive& archive, const std::vector<Molecule>& molecules);
std::vector<Molecule> read_molecules(const io::Archive& archive);

}  // namespace hetmol::ingest
