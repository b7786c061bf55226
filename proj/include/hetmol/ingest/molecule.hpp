// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetmol::ingest {

/// The twelve QM9 targets, in the column order of the QM9 property line.
enum class Property { kMu, kAlpha, kHomo, kLumo, kGap, kR2, kZpve, kU0, kU, kH, kG, kCv };

inline constexpr std::array<Property, 12> kAllProperties = {
    Property::kMu, Property::kAlpha, Property::kHomo, Property::kLumo, Property::kGap, Property::kR2,
    Property::kZpve, Property::kU0, Property::kU, Property::kH, Property::kG, Property::kCv};

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);
std::string valid_property_names();

/// Stored in Hartree by QM9 and converted to eV on ingest.
bool is_energy(Property p);
/// Properties whose training target is reduced by per-atom reference values.
bool has_atom_reference(Property p);

using PropertyMap = std::map<Property, double>;
using Vec3 = std::array<double, 3>;

struct Atom {
  int atomic_number = 0;
  Vec3 position{};  // Angstrom
};

class MoleculeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Molecule {
  std::string id;
  std::vector<Atom> atoms;
  PropertyMap targets;

  std::vector<Vec3> positions() const;
  std::vector<int> atomic_numbers() const;

  /// Throws MoleculeError when the record violates a structural invariant
  /// (empty, atomic number < 1, non-finite coordinate).
  void validate() const;
};

}  // namespace hetmol::ingest
