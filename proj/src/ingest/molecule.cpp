// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/molecule.hpp"

#include <cmath>

namespace hetmol::ingest {

namespace {
constexpr std::array<std::string_view, 12> kNames = {"mu", "alpha", "homo", "lumo", "gap", "r2",
                                                     "zpve", "U0", "U", "H", "G", "Cv"};
}

std::string_view property_name(Property p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Property> property_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Property>(i);
  return std::nullopt;
}

std::string valid_property_names() {
  std::string out;
  for (auto n : kNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

bool is_energy(Property p) {
  switch (p) {
    case Property::kHomo:
    case Property::kLumo:
    case Property::kGap:
    case Property::kZpve:
    case Property::kU0:
    case Property::kU:
    case Property::kH:
    case Property::kG:
      return true;
    default:
      return false;
  }
}

bool has_atom_reference(Property p) {
  switch (p) {
    case Property::kU0:
    case Property::kU:
    case Property::kH:
    case Property::kG:
    case Property::kCv:
      return true;
    default:
      return false;
  }
}

std::vector<Vec3> Molecule::positions() const {
  std::vector<Vec3> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(a.position);
  return out;
}

std::vector<int> Molecule::atomic_numbers() const {
  std::vector<int> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(a.atomic_number);
  return out;
}

void Molecule::validate() const {
  if (atoms.empty()) throw MoleculeError("molecule '" + id + "' has no atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].atomic_number < 1)
      throw MoleculeError("molecule '" + id + "' atom " + std::to_string(i) + " has atomic number < 1");
    for (double x : atoms[i].position)
      if (!std::isfinite(x))
        throw MoleculeError("molecule '" + id + "' atom " + std::to_string(i) + " has a non-finite coordinate");
  }
}

}  // namespace hetmol::ingest
