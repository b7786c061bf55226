// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hetmol/common/archive.hpp"
#include "hetmol/ingest/cache.hpp"
#include "hetmol/ingest/elements.hpp"
#include "hetmol/ingest/reference.hpp"
#include "hetmol/ingest/split.hpp"
#include "hetmol/ingest/units.hpp"
#include "hetmol/ingest/xyz.hpp"
#include "hetmol/synth/qm9_like.hpp"
#include "test_support.hpp"

using namespace hetmol;
using namespace hetmol::ingest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

ParseErrorKind parse_kind(const std::string& text) {
  try {
    parse_xyz(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for:\n" << text);
  return ParseErrorKind::kMalformedCount;
}

int parse_line(const std::string& text) {
  try {
    parse_xyz(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal record parses to one hydrogen at the origin") {
  const Molecule m = parse_xyz("1\n0.0\nH 0 0 0\n");
  REQUIRE(m.atoms.size() == 1);
  CHECK(m.atoms[0].atomic_number == 1);
  CHECK(m.atoms[0].position == Vec3{0, 0, 0});
}

TEST_CASE("parse errors are distinct and carry line numbers") {
  CHECK(parse_kind("x\n\nH 0 0 0\n") == ParseErrorKind::kMalformedCount);
  CHECK(parse_kind("4\n\nC 0 0 0\nO 0 0 1.2\nH 0 1 0\n") == ParseErrorKind::kAtomCountMismatch);
  CHECK(parse_kind("2\n\nC 0 0 0\nQq 0 0 1\n") == ParseErrorKind::kUnknownElement);
  CHECK(parse_kind("2\n\nC 0 0 0\nO 0 zero 1\n") == ParseErrorKind::kNonNumericCoordinate);

  CHECK(parse_line("x\n\nH 0 0 0\n") == 1);
  CHECK(parse_line("2\n\nC 0 0 0\nQq 0 0 1\n") == 4);
  CHECK(parse_line("3\n\nC 0 0 0\nO 0 0 1\nH 0 1.0x 0\n") == 5);
}

TEST_CASE("errors in a concatenated stream report the line within the stream") {
  const std::string text = "1\n\nH 0 0 0\n2\n\nC 0 0 0\nO 0 0 abc\n";
  try {
    parse_xyz_stream(text, "stream.xyz");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::kNonNumericCoordinate);
    CHECK(e.line() == 7);
    CHECK(e.source() == "stream.xyz");
  }
}

TEST_CASE("formaldehyde record agrees with the raw file") {
  const auto path = testing::test_data("formaldehyde.xyz");
  const auto text = slurp(path);
  const Molecule m = parse_xyz(text);

  // Independent reading of the raw text: line 1 is the count, line 2 holds
  // "gdb <id>" then A, B, C and the twelve targets in QM9 order.
  std::istringstream lines(text);
  std::string count_line, prop_line;
  std::getline(lines, count_line);
  std::getline(lines, prop_line);
  const auto fields = split_ws(prop_line);
  REQUIRE(fields.size() == 17);

  CHECK(m.atoms.size() == static_cast<std::size_t>(std::stoi(count_line)));
  CHECK(m.atomic_numbers() == std::vector<int>{6, 8, 1, 1});
  CHECK(m.id == fields[1]);
  CHECK(m.targets.size() == 12);
  CHECK(m.targets.at(Property::kU0) == std::stod(fields[12]));
  CHECK(m.targets.at(Property::kMu) == std::stod(fields[5]));
  CHECK(m.targets.at(Property::kCv) == std::stod(fields[16]));

  // Coordinates are taken verbatim; the trailing charge column is ignored.
  std::string atom_line;
  std::getline(lines, atom_line);
  const auto c = split_ws(atom_line);
  CHECK(m.atoms[0].position == Vec3{std::stod(c[1]), std::stod(c[2]), std::stod(c[3])});
}

TEST_CASE("unit conversion touches energies only") {
  CHECK(kHartreeToEv == 27.211386245988);
  CHECK(convert_units({{Property::kU0, 0.0}}).at(Property::kU0) == 0.0);
  CHECK_THAT(convert_units({{Property::kU0, 1.0}}).at(Property::kU0), WithinRel(27.211386245988, 1e-15));
  CHECK(convert_units({{Property::kMu, 1.5}}).at(Property::kMu) == 1.5);

  PropertyMap all;
  for (Property p : kAllProperties) all[p] = 2.0;
  const auto out = convert_units(all);
  for (Property p : kAllProperties) {
    const double expected = is_energy(p) ? 2.0 * kHartreeToEv : 2.0;
    CHECK(out.at(p) == expected);
  }
  // Energies are the eight orbital/thermo quantities.
  CHECK(std::count_if(kAllProperties.begin(), kAllProperties.end(), is_energy) == 8);
  CHECK_FALSE(is_energy(Property::kAlpha));
  CHECK_FALSE(is_energy(Property::kR2));
  CHECK_FALSE(is_energy(Property::kCv));
}

TEST_CASE("reference subtraction examples") {
  Molecule h2;
  h2.atoms = {{1, {0, 0, 0}}, {1, {0, 0, 0.74}}};
  h2.targets[Property::kU0] = -1.17;

  ReferenceTable zeros;
  zeros.set(1, Property::kU0, 0.0);
  CHECK(subtract_reference(h2, Property::kU0, zeros) == -1.17);

  ReferenceTable refs;
  refs.set(1, Property::kU0, -0.5);
  CHECK_THAT(subtract_reference(h2, Property::kU0, refs), WithinAbs(-1.17 - 2 * -0.5, 1e-15));

  ReferenceTable missing;
  missing.set(6, Property::kU0, -37.8);
  try {
    subtract_reference(h2, Property::kU0, missing);
    FAIL("expected a lookup error");
  } catch (const ReferenceLookupError& e) {
    CHECK(e.atomic_number() == 1);
  }
}

TEST_CASE("formaldehyde atomization energy from the shipped atomref table") {
  const auto refs = ReferenceTable::load(testing::repo_data("atomref_qm9.txt"));
  const Molecule m = parse_xyz(slurp(testing::test_data("formaldehyde.xyz")));
  // Hand sum of the published constants: C + O + 2 H.
  const double expected = -114.483613 - (-37.846772 + -75.064579 + 2 * -0.500273);
  CHECK_THAT(subtract_reference(m, Property::kU0, refs), WithinAbs(expected, 1e-12));
  CHECK_THAT(subtract_reference(m, Property::kCv, refs), WithinAbs(6.413 - 4 * 2.981, 1e-12));
}

TEST_CASE("shipped atomref file matches the generator's embedded constants") {
  const auto file = ReferenceTable::load(testing::repo_data("atomref_qm9.txt"));
  const auto embedded = synth::qm9_atomrefs();
  CHECK(file.size() == embedded.size());
  for (int z : {1, 6, 7, 8, 9})
    for (Property p : {Property::kZpve, Property::kU0, Property::kU, Property::kH, Property::kG, Property::kCv})
      CHECK(file.at(z, p) == embedded.at(z, p));
}

TEST_CASE("reference subtraction is linear in the table") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Molecule m = testing::random_cloud(1 + static_cast<int>(rng.below(9)), 4.0, rng);
    m.targets[Property::kU0] = rng.uniform(-500, 0);
    ReferenceTable a, doubled;
    for (int z : {1, 6, 7, 8, 9}) {
      const double v = rng.uniform(-100, 0);
      a.set(z, Property::kU0, v);
      doubled.set(z, Property::kU0, 2 * v);
    }
    const double raw = m.targets[Property::kU0];
    const double removed = raw - subtract_reference(m, Property::kU0, a);
    const double removed2 = raw - subtract_reference(m, Property::kU0, doubled);
    CHECK_THAT(removed2, WithinAbs(2 * removed, 1e-9));
  }
}

TEST_CASE("normalization subtracts references before converting units") {
  Molecule m;
  m.atoms = {{1, {0, 0, 0}}};
  m.targets = {{Property::kU0, -0.6}, {Property::kMu, 1.0}, {Property::kHomo, -0.25}};
  ReferenceTable refs;
  refs.set(1, Property::kU0, -0.5);
  normalize_targets(m, &refs);
  CHECK_THAT(m.targets[Property::kU0], WithinAbs(-0.1 * kHartreeToEv, 1e-12));
  CHECK(m.targets[Property::kMu] == 1.0);
  CHECK(m.targets[Property::kHomo] == -0.25 * kHartreeToEv);
}

TEST_CASE("gap composition") {
  CHECK(compose_gap(-5.0, -1.0) == 4.0);
  CHECK(compose_gap(-3.3, -3.3) == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double h = rng.uniform(-10, 0), l = rng.uniform(-5, 5);
    CHECK(compose_gap(h, l) == l - h);
  }
}

TEST_CASE("split examples") {
  const Split s = split_dataset(10, {6, 2, 2, 1});
  CHECK(s.train.size() == 6);
  CHECK(s.val.size() == 2);
  CHECK(s.test.size() == 2);
  std::set<std::int64_t> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 9);

  const Split again = split_dataset(10, {6, 2, 2, 1});
  CHECK(again.train == s.train);
  CHECK(again.val == s.val);
  CHECK(again.test == s.test);

  const Split full = split_dataset(130831, {110000, 10000, 10831, 0});
  CHECK(full.train.size() == 110000);
  CHECK(full.val.size() == 10000);
  CHECK(full.test.size() == 10831);

  CHECK_THROWS_AS(split_dataset(10, {6, 3, 2, 1}), std::invalid_argument);
}

TEST_CASE("splits are disjoint and size-exact for random specs") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::int64_t>(rng.below(300));
    const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n) + 1));
    const auto b = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - a) + 1));
    const auto c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - a - b) + 1));
    const Split s = split_dataset(n, {a, b, c, rng.next_u64()});
    REQUIRE(static_cast<std::int64_t>(s.train.size()) == a);
    REQUIRE(static_cast<std::int64_t>(s.val.size()) == b);
    REQUIRE(static_cast<std::int64_t>(s.test.size()) == c);
    std::set<std::int64_t> seen;
    for (const auto* part : {&s.train, &s.val, &s.test})
      for (auto i : *part) {
        REQUIRE(i >= 0);
        REQUIRE(i < n);
        seen.insert(i);
      }
    REQUIRE(static_cast<std::int64_t>(seen.size()) == a + b + c);
  }
}

TEST_CASE("write then parse is identity on atoms and targets") {
  auto mols = synth::generate_molecules(40, 21);
  mols.push_back(parse_xyz(slurp(testing::test_data("formaldehyde.xyz"))));
  for (const auto& m : mols) {
    const Molecule back = parse_xyz(to_xyz(m));
    REQUIRE(back.atoms.size() == m.atoms.size());
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      CHECK(back.atoms[i].atomic_number == m.atoms[i].atomic_number);
      for (int k = 0; k < 3; ++k)
        CHECK_THAT(back.atoms[i].position[static_cast<std::size_t>(k)],
                   WithinRel(m.atoms[i].position[static_cast<std::size_t>(k)], 1e-12) ||
                       WithinAbs(m.atoms[i].position[static_cast<std::size_t>(k)], 1e-300));
    }
    REQUIRE(back.targets.size() == m.targets.size());
    for (const auto& [p, v] : m.targets) CHECK_THAT(back.targets.at(p), WithinRel(v, 1e-12) || WithinAbs(v, 1e-300));
  }
}

TEST_CASE("molecule cache round-trips bit for bit") {
  const auto mols = synth::generate_molecules(25, 4);
  io::Archive archive("test", 1);
  write_molecules(archive, mols);
  const auto bytes = archive.serialize();
  const auto back = read_molecules(io::Archive::deserialize(bytes, "test", 1));
  REQUIRE(back.size() == mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) {
    CHECK(back[i].id == mols[i].id);
    CHECK(back[i].positions() == mols[i].positions());
    CHECK(back[i].atomic_numbers() == mols[i].atomic_numbers());
    CHECK(back[i].targets == mols[i].targets);
  }
}

TEST_CASE("gzip input, directories and exclusion lists") {
  const auto dir = testing::scratch_dir("ingest_io");
  const auto text = slurp(testing::test_data("formaldehyde.xyz")) + slurp(testing::test_data("methane.xyz"));
  {
    gzFile f = gzopen((dir / "both.xyz.gz").c_str(), "wb");
    REQUIRE(f != nullptr);
    gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
  }
  const auto mols = read_xyz_source(dir / "both.xyz.gz");
  REQUIRE(mols.size() == 2);
  CHECK(mols[0].id == "6");
  CHECK(mols[1].id == "1");
  CHECK(mols[1].atoms.size() == 5);

  const auto plain = dir / "plain";
  std::filesystem::create_directories(plain);
  std::filesystem::copy_file(testing::test_data("methane.xyz"), plain / "a.xyz");
  std::filesystem::copy_file(testing::test_data("formaldehyde.xyz"), plain / "b.xyz");
  const auto from_dir = read_xyz_source(plain);
  REQUIRE(from_dir.size() == 2);
  CHECK(from_dir[0].atoms.size() == 5);

  std::ofstream(dir / "excluded.txt") << "# uncharacterized\n   6  gdb_6  extra\n00012\n";
  CHECK(read_exclusion_list(dir / "excluded.txt") == std::set<std::string>{"6", "12"});

  std::filesystem::create_directories(dir / "empty");
  CHECK_THROWS(read_xyz_source(dir / "empty"));
}

TEST_CASE("element symbols round-trip") {
  for (int z = 1; z <= 9; ++z) CHECK(atomic_number(element_symbol(z)) == z);
  CHECK_FALSE(atomic_number("Xx").has_value());
}

TEST_CASE("molecule validation") {
  Molecule m;
  CHECK_THROWS_AS(m.validate(), MoleculeError);
  m.atoms = {{0, {0, 0, 0}}};
  CHECK_THROWS_AS(m.validate(), MoleculeError);
  m.atoms = {{1, {0, std::nan(""), 0}}};
  CHECK_THROWS_AS(m.validate(), MoleculeError);
  m.atoms = {{1, {0, 0, 0}}};
  CHECK_NOTHROW(m.validate());
}
