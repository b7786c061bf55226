// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/reference.hpp"

#include <sstream>
#include <vector>

#include "hetmol/ingest/elements.hpp"
#include "hetmol/ingest/units.hpp"
#include "hetmol/ingest/xyz.hpp"

namespace hetmol::ingest {

ReferenceLookupError::ReferenceLookupError(int atomic_number, Property property)
    : std::out_of_range("no reference value for atomic number " + std::to_string(atomic_number) + " (" +
                        std::string(element_symbol(atomic_number)) + "), property " +
                        std::string(property_name(property))),
      atomic_number_(atomic_number) {}

void ReferenceTable::set(int atomic_number, Property property, double value) {
  values_[{atomic_number, property}] = value;
}

double ReferenceTable::at(int atomic_number, Property property) const {
  auto it = values_.find({atomic_number, property});
  if (it == values_.end()) throw ReferenceLookupError(atomic_number, property);
  return it->second;
}

bool ReferenceTable::contains(int atomic_number, Property property) const {
  return values_.count({atomic_number, property}) != 0;
}

ReferenceTable ReferenceTable::parse(std::string_view text) {
  ReferenceTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::optional<Property>> columns;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> t;
    for (std::string tok; ls >> tok;) t.push_back(tok);
    if (t.empty() || t[0][0] == '#') continue;
    if (!have_header) {
      if (t[0] != "element")
        throw std::runtime_error("reference table line " + std::to_string(line_no) +
                                 ": expected header starting with 'element'");
      for (std::size_t i = 1; i < t.size(); ++i) {
        auto p = property_from_name(t[i]);
        if (!p) throw std::runtime_error("reference table header: unknown property '" + t[i] + "'");
        columns.push_back(p);
      }
      have_header = true;
      continue;
    }
    auto z = atomic_number(t[0]);
    if (!z) throw std::runtime_error("reference table line " + std::to_string(line_no) + ": unknown element " + t[0]);
    if (t.size() != columns.size() + 1)
      throw std::runtime_error("reference table line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns.size()) + " values");
    for (std::size_t i = 0; i < columns.size(); ++i) table.set(*z, *columns[i], std::stod(t[i + 1]));
  }
  if (!have_header) throw std::runtime_error("reference table has no header line");
  return table;
}

ReferenceTable ReferenceTable::load(const std::filesystem::path& path) {
  return parse(read_text_maybe_gzip(path));
}

double subtract_reference(const Molecule& molecule, Property property, const ReferenceTable& refs) {
  if (!has_atom_reference(property))
    throw std::invalid_argument("property " + std::string(property_name(property)) + " has no atomic reference");
  auto it = molecule.targets.find(property);
  if (it == molecule.targets.end())
    throw std::invalid_argument("molecule '" + molecule.id + "' has no value for " +
                                std::string(property_name(property)));
  double total = 0.0;
  for (const auto& a : molecule.atoms) total += refs.at(a.atomic_number, property);
  return it->second - total;
}

void normalize_targets(Molecule& molecule, const ReferenceTable* refs) {
  if (refs) {
    for (auto& [p, v] : molecule.targets)
      if (has_atom_reference(p)) v = subtract_reference(molecule, p, *refs);
  }
  molecule.targets = convert_units(molecule.targets);
}

}  // namespace hetmol::ingest
