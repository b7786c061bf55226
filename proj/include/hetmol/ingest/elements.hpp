// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>

namespace hetmol::ingest {

/// Atomic number for a periodic-table symbol (case-sensitive, "C", "Cl").
std::optional<int> atomic_number(std::string_view symbol);
std::string_view element_symbol(int atomic_number);

}  // namespace hetmol::ingest
