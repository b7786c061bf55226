// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hetmol/ingest/molecule.hpp"

namespace hetmol::ingest {

/// Hartree energy in eV, CODATA 2018 recommended value
/// (https://physics.nist.gov/cgi-bin/cuu/Value?hrev).
inline constexpr double kHartreeToEv = 27.211386245988;

/// Energies (homo, lumo, gap, zpve, U0, U, H, G) Hartree -> eV; everything
/// else passes through.
PropertyMap convert_units(const PropertyMap& targets);

}  // namespace hetmol::ingest
