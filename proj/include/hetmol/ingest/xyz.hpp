// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetmol/ingest/molecule.hpp"

namespace hetmol::ingest {

enum class ParseErrorKind {
  kMalformedCount,
  kAtomCountMismatch,
  kUnknownElement,
  kNonNumericCoordinate,
  kMalformedProperties,
};

std::string_view parse_error_kind_name(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& detail, std::string source = {});

  ParseErrorKind kind() const { return kind_; }
  /// 1-based line number within the parsed text.
  int line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  ParseErrorKind kind_;
  int line_;
  std::string source_;
};

/// Parses one QM9 extended-XYZ record: an atom-count line, a property line,
/// then one "element x y z [charge]" line per atom. Lines after the atom block
/// (QM9 frequencies, SMILES, InChI) are ignored.
///
/// The property line is either the QM9 layout ("gdb <index> A B C" followed by
/// the twelve targets in Table order), twelve bare numbers, or a shorter list
/// mapped onto the leading target names. Raw units are kept.
Molecule parse_xyz(std::string_view text);

/// Parses every record of a concatenated stream. Record ids default to
/// "<source>:<ordinal>" unless the property line carries a gdb index.
std::vector<Molecule> parse_xyz_stream(std::string_view text, const std::string& source = {});

/// QM9-layout text with 17 significant digits, so parse(to_xyz(m)) == m.
std::string to_xyz(const Molecule& molecule);

/// Reads a file (gzip or plain) or every *.xyz / *.xyz.gz file of a
/// directory in name order. Throws std::runtime_error for an empty directory.
std::vector<Molecule> read_xyz_source(const std::filesystem::path& path);

/// Reads a file as text, transparently decompressing gzip.
std::string read_text_maybe_gzip(const std::filesystem::path& path);

/// Ids listed one per line (the QM9 "uncharacterized" list format: the first
/// integer on each non-comment line).
std::set<std::string> read_exclusion_list(const std::filesystem::path& path);

}  // namespace hetmol::ingest
