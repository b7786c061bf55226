// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "hetmol/ingest/molecule.hpp"

namespace hetmol::ingest {

class ReferenceLookupError : public std::out_of_range {
 public:
  ReferenceLookupError(int atomic_number, Property property);
  int atomic_number() const { return atomic_number_; }

 private:
  int atomic_number_;
};

/// Per-(element, property) reference values in raw dataset units.
///
/// Text format: '#' comment lines, then a header line "element <prop> ..."
/// naming property columns (U0, U, H, G, Cv, zpve), then one row per
/// element symbol.
class ReferenceTable {
 public:
  void set(int atomic_number, Property property, double value);
  double at(int atomic_number, Property property) const;
  bool contains(int atomic_number, Property property) const;
  std::size_t size() const { return values_.size(); }

  static ReferenceTable parse(std::string_view text);
  static ReferenceTable load(const std::filesystem::path& path);

 private:
  std::map<std::pair<int, Property>, double> values_;
};

/// targets[property] - sum over atoms of refs(Z, property). Only U0, U, H, G
/// and Cv carry references.
double subtract_reference(const Molecule& molecule, Property property, const ReferenceTable& refs);

/// Ingest normalization: reference subtraction (when refs are given) in raw
/// units, then Hartree -> eV conversion.
void normalize_targets(Molecule& molecule, const ReferenceTable* refs);

/// Delta-epsilon from the two orbital energies.
inline double compose_gap(double eps_homo, double eps_lumo) { return eps_lumo - eps_homo; }

}  // namespace hetmol::ingest
