// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/units.hpp"

namespace hetmol::ingest {

PropertyMap convert_units(const PropertyMap& targets) {
  PropertyMap out = targets;
  for (auto& [p, v] : out)
    if (is_energy(p)) v *= kHartreeToEv;
  return out;
}

}  // namespace hetmol::ingest
