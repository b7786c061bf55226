// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/xyz.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "hetmol/ingest/elements.hpp"

namespace hetmol::ingest {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
    if (end == text.size()) break;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto begin = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

bool is_blank(std::string_view line) { return tokens(line).empty(); }

/// QM9 writes some exponents Mathematica-style ("1.5*^-6").
std::optional<double> parse_real(std::string_view token) {
  std::string s(token);
  if (auto p = s.find("*^"); p != std::string::npos) s.replace(p, 2, "e");
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return std::nullopt;
  return v;
}

std::optional<long> parse_count(std::string_view line) {
  auto t = tokens(line);
  if (t.size() != 1) return std::nullopt;
  long n = 0;
  auto [ptr, ec] = std::from_chars(t[0].data(), t[0].data() + t[0].size(), n);
  if (ec != std::errc() || ptr != t[0].data() + t[0].size()) return std::nullopt;
  return n;
}

bool starts_alpha(std::string_view tok) { return !tok.empty() && std::isalpha(static_cast<unsigned char>(tok[0])); }

/// True when the line would parse as a complete atom line.
bool looks_like_atom_line(std::string_view line) {
  auto t = tokens(line);
  if (t.size() < 4 || !starts_alpha(t[0]) || !atomic_number(t[0])) return false;
  return parse_real(t[1]) && parse_real(t[2]) && parse_real(t[3]);
}

void parse_properties(std::string_view line, int line_no, Molecule& mol, const std::string& source) {
  auto t = tokens(line);
  if (t.empty()) return;
  std::size_t first_value = 0;
  if (!parse_real(t[0])) {
    if (t[0] != "gdb") return;  // free-form comment line, no targets
    if (t.size() < 2) throw ParseError(ParseErrorKind::kMalformedProperties, line_no, "gdb tag without index", source);
    mol.id = std::string(t[1]);
    first_value = 2;
  }
  std::vector<double> values;
  for (std::size_t i = first_value; i < t.size(); ++i) {
    auto v = parse_real(t[i]);
    if (!v)
      throw ParseError(ParseErrorKind::kMalformedProperties, line_no,
                       "non-numeric property value '" + std::string(t[i]) + "'", source);
    values.push_back(*v);
  }
  std::size_t offset = 0;
  if (values.size() >= 15) {
    offset = 3;  // rotational constants A, B, C precede the targets
  } else if (values.size() > 12) {
    throw ParseError(ParseErrorKind::kMalformedProperties, line_no,
                     "expected 12 targets or the 15-value QM9 layout, got " + std::to_string(values.size()), source);
  }
  for (std::size_t k = 0; k < 12 && offset + k < values.size(); ++k) {
    const double v = values[offset + k];
    if (std::isnan(v)) continue;
    mol.targets[kAllProperties[k]] = v;
  }
}

Molecule parse_record(const std::vector<std::string_view>& lines, std::size_t& pos, const std::string& source) {
  const int count_line_no = static_cast<int>(pos) + 1;
  auto count = parse_count(lines[pos]);
  if (!count || *count < 1)
    throw ParseError(ParseErrorKind::kMalformedCount, count_line_no,
                     "expected a positive atom count, got '" + std::string(lines[pos]) + "'", source);
  Molecule mol;
  if (pos + 1 < lines.size()) parse_properties(lines[pos + 1], count_line_no + 1, mol, source);
  const std::size_t first_atom = pos + 2;
  for (long k = 0; k < *count; ++k) {
    const std::size_t idx = first_atom + static_cast<std::size_t>(k);
    const int line_no = static_cast<int>(idx) + 1;
    if (idx >= lines.size())
      throw ParseError(ParseErrorKind::kAtomCountMismatch, line_no,
                       "record declares " + std::to_string(*count) + " atoms but has " + std::to_string(k), source);
    auto t = tokens(lines[idx]);
    if (t.empty() || !starts_alpha(t[0]))
      throw ParseError(ParseErrorKind::kAtomCountMismatch, line_no,
                       "record declares " + std::to_string(*count) + " atoms but has " + std::to_string(k), source);
    auto z = atomic_number(t[0]);
    if (!z)
      throw ParseError(ParseErrorKind::kUnknownElement, line_no, "unknown element '" + std::string(t[0]) + "'",
                       source);
    if (t.size() < 4)
      throw ParseError(ParseErrorKind::kNonNumericCoordinate, line_no, "atom line needs three coordinates", source);
    Atom atom;
    atom.atomic_number = *z;
    for (int c = 0; c < 3; ++c) {
      auto v = parse_real(t[1 + static_cast<std::size_t>(c)]);
      if (!v || !std::isfinite(*v))
        throw ParseError(ParseErrorKind::kNonNumericCoordinate, line_no,
                         "bad coordinate '" + std::string(t[1 + static_cast<std::size_t>(c)]) + "'", source);
      atom.position[static_cast<std::size_t>(c)] = *v;
    }
    mol.atoms.push_back(atom);
  }
  pos = first_atom + static_cast<std::size_t>(*count);
  if (pos < lines.size() && looks_like_atom_line(lines[pos]))
    throw ParseError(ParseErrorKind::kAtomCountMismatch, static_cast<int>(pos) + 1,
                     "more atom lines than the declared count " + std::to_string(*count), source);
  // Skip QM9 trailer lines up to the next count line.
  while (pos < lines.size() && !parse_count(lines[pos])) ++pos;
  return mol;
}

}  // namespace

std::string_view parse_error_kind_name(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformedCount: return "malformed-count";
    case ParseErrorKind::kAtomCountMismatch: return "atom-count-mismatch";
    case ParseErrorKind::kUnknownElement: return "unknown-element";
    case ParseErrorKind::kNonNumericCoordinate: return "non-numeric-coordinate";
    case ParseErrorKind::kMalformedProperties: return "malformed-properties";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, int line, const std::string& detail, std::string source)
    : std::runtime_error((source.empty() ? std::string() : source + ":") + std::to_string(line) + ": " +
                         std::string(parse_error_kind_name(kind)) + ": " + detail),
      kind_(kind),
      line_(line),
      source_(std::move(source)) {}

Molecule parse_xyz(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t pos = 0;
  while (pos < lines.size() && is_blank(lines[pos])) ++pos;
  if (pos >= lines.size()) throw ParseError(ParseErrorKind::kMalformedCount, 1, "empty record");
  return parse_record(lines, pos, {});
}

std::vector<Molecule> parse_xyz_stream(std::string_view text, const std::string& source) {
  auto lines = split_lines(text);
  std::vector<Molecule> out;
  std::size_t pos = 0;
  while (true) {
    while (pos < lines.size() && is_blank(lines[pos])) ++pos;
    if (pos >= lines.size()) break;
    Molecule mol = parse_record(lines, pos, source);
    if (mol.id.empty()) mol.id = (source.empty() ? std::string("record") : source) + ":" + std::to_string(out.size());
    out.push_back(std::move(mol));
  }
  return out;
}

std::string to_xyz(const Molecule& molecule) {
  std::ostringstream os;
  char buf[64];
  os << molecule.atoms.size() << "\n";
  os << "gdb " << (molecule.id.empty() ? std::string("0") : molecule.id) << "\t0\t0\t0";
  for (Property p : kAllProperties) {
    auto it = molecule.targets.find(p);
    if (it == molecule.targets.end()) {
      os << "\tnan";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", it->second);
      os << '\t' << buf;
    }
  }
  os << "\n";
  for (const auto& a : molecule.atoms) {
    os << element_symbol(a.atomic_number);
    for (double x : a.position) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << '\t' << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string read_text_maybe_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw std::runtime_error("read error in " + path.string());
  return out;
}

std::vector<Molecule> read_xyz_source(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  auto stem = [](const fs::path& p) {
    std::string name = p.filename().string();
    for (std::string_view ext : {".xyz.gz", ".xyz", ".gz"})
      if (name.size() > ext.size() && name.ends_with(ext)) return name.substr(0, name.size() - ext.size());
    return name;
  };
  if (!fs::is_directory(path)) {
    if (!fs::exists(path)) throw std::runtime_error("input " + path.string() + " does not exist");
    return parse_xyz_stream(read_text_maybe_gzip(path), stem(path));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.ends_with(".xyz") || name.ends_with(".xyz.gz")) files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no .xyz files in directory " + path.string());
  std::sort(files.begin(), files.end());
  std::vector<Molecule> out;
  for (const auto& f : files) {
    auto mols = parse_xyz_stream(read_text_maybe_gzip(f), stem(f));
    if (mols.size() == 1 && mols[0].id == stem(f) + ":0") mols[0].id = stem(f);
    for (auto& m : mols) out.push_back(std::move(m));
  }
  return out;
}

std::set<std::string> read_exclusion_list(const std::filesystem::path& path) {
  std::set<std::string> ids;
  std::istringstream in(read_text_maybe_gzip(path));
  std::string line;
  while (std::getline(in, line)) {
    auto t = tokens(line);
    if (t.empty() || t[0][0] == '#') continue;
    long v = 0;
    auto [ptr, ec] = std::from_chars(t[0].data(), t[0].data() + t[0].size(), v);
    if (ec == std::errc() && ptr == t[0].data() + t[0].size()) ids.insert(std::to_string(v));
  }
  return ids;
}

}  // namespace hetmol::ingest
