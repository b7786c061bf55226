// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hetmol/common/archive.hpp"
#include "hetmol/graph/composition.hpp"
#include "hetmol/graph/hmg.hpp"

namespace hetmol::graph {

void write_vocabulary(io::Archive& archive, const CompositionHash& hash);
CompositionHash read_vocabulary(const io::Archive& archive);

/// Per-table concatenations plus per-molecule offsets under "hmg/".
void write_hmgs(io::Archive& archive, const std::vector<HeteroMolGraph>& graphs);
std::vector<HeteroMolGraph> read_hmgs(const io::Archive& archive);

}  // namespace hetmol::graph
