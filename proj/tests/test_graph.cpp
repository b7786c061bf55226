// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "hetmol/common/archive.hpp"
#include "hetmol/graph/cache.hpp"
#include "hetmol/graph/counting.hpp"
#include "hetmol/synth/qm9_like.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hetmol;
using namespace hetmol::graph;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ingest::Molecule from_points(std::vector<ingest::Vec3> pts, std::vector<int> z = {}) {
  ingest::Molecule m;
  m.id = "pts";
  for (std::size_t i = 0; i < pts.size(); ++i) m.atoms.push_back({z.empty() ? 6 : z[i], pts[i]});
  return m;
}

ingest::Molecule formaldehyde() {
  std::ifstream in(testing::test_data("formaldehyde.xyz"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ingest::parse_xyz(ss.str());
}

HeteroMolGraph hmg_of(const ingest::Molecule& m, double c, CompositionHash& vocab) {
  return build_hmg(build_molecular_graph(m, c), m, vocab);
}

std::size_t count_dst(const EdgeList& e, int node) {
  return static_cast<std::size_t>(std::count(e.dst.begin(), e.dst.end(), node));
}

bool symmetric(const EdgeList& e) {
  std::multiset<std::pair<int, int>> fwd, rev;
  for (std::size_t k = 0; k < e.size(); ++k) {
    fwd.insert({e.src[k], e.dst[k]});
    rev.insert({e.dst[k], e.src[k]});
  }
  return fwd == rev;
}

}  // namespace

TEST_CASE("pairwise distance examples") {
  const std::vector<Vec3> two{{0, 0, 0}, {3, 4, 0}};
  const auto d = pairwise_distances(two);
  CHECK(d(0, 1) == 5.0);
  CHECK(d(1, 0) == 5.0);
  CHECK(d(0, 0) == 0.0);

  const std::vector<Vec3> one{{1, 2, 3}};
  const auto d1 = pairwise_distances(one);
  CHECK(d1.size() == 1);
  CHECK(d1(0, 0) == 0.0);
}

TEST_CASE("pairwise distances match a scalar double loop") {
  Rng rng(1);
  const auto m = testing::random_cloud(6, 5.0, rng);
  const auto pos = m.positions();
  const auto d = pairwise_distances(pos);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += (pos[i][k] - pos[j][k]) * (pos[i][k] - pos[j][k]);
      CHECK_THAT(d(i, j), WithinRel(std::sqrt(s), 1e-12) || WithinAbs(0.0, 0.0));
    }
}

TEST_CASE("cutoff uses a strict inequality") {
  CHECK(build_molecular_graph(from_points({{0, 0, 0}, {1, 0, 0}}), 2.0).edges.size() == 1);
  CHECK(build_molecular_graph(from_points({{0, 0, 0}, {3, 0, 0}}), 2.0).edges.size() == 0);
  CHECK(build_molecular_graph(from_points({{0, 0, 0}, {2, 0, 0}}), 2.0).edges.size() == 0);
  CHECK(build_molecular_graph(from_points({{0, 0, 0}, {std::nextafter(2.0, 0.0), 0, 0}}), 2.0).edges.size() == 1);
}

TEST_CASE("formaldehyde molecular graph at c = 2 matches brute force") {
  const auto m = formaldehyde();
  const auto g = build_molecular_graph(m, 2.0);
  std::vector<std::pair<int, int>> expected;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (oracle::dist(m.atoms[static_cast<std::size_t>(i)].position, m.atoms[static_cast<std::size_t>(j)].position) < 2.0)
        expected.push_back({i, j});
  std::vector<std::pair<int, int>> got;
  for (const auto& e : g.edges) got.push_back({e.i, e.j});
  CHECK(got == expected);
  // The three covalent bonds C=O, C-H, C-H plus the H...H contact at ~1.89 A.
  CHECK(got.size() == 4);
  for (const auto& e : g.edges)
    CHECK_THAT(e.distance, WithinRel(oracle::dist(m.atoms[static_cast<std::size_t>(e.i)].position,
                                                  m.atoms[static_cast<std::size_t>(e.j)].position),
                                     1e-12));
}

TEST_CASE("HMG of a three-atom path") {
  CompositionHash vocab;
  const auto m = from_points({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const auto h = hmg_of(m, 1.5, vocab);
  CHECK(h.pair_atoms == std::vector<std::array<int, 2>>{{0, 1}, {1, 2}});
  // One undirected 2-2 edge through atom 1, stored in both directions.
  CHECK(h.pair_pair.size() == 2);
  CHECK_THAT(h.pair_pair_angle[0], WithinAbs(std::numbers::pi, 1e-12));
  CHECK(h.atom_pair.size() == 4);
  CHECK(h.atom_atom.size() == 4);
}

TEST_CASE("HMG of a single atom is empty beyond order 1") {
  CompositionHash vocab;
  const auto h = hmg_of(from_points({{0, 0, 0}}, {8}), 3.0, vocab);
  CHECK(h.num_atoms() == 1);
  CHECK(h.num_pairs() == 0);
  CHECK(h.atom_atom.size() == 0);
  CHECK(h.pair_pair.size() == 0);
  CHECK(h.atom_pair.size() == 0);
}

TEST_CASE("complete graphs give 2(N-2) same-order neighbours per pair") {
  Rng rng(9);
  for (int n = 2; n <= 9; ++n) {
    CompositionHash vocab;
    const auto m = testing::random_cloud(n, 3.0, rng);
    const auto h = hmg_of(m, 100.0, vocab);
    REQUIRE(h.num_pairs() == static_cast<std::size_t>(n * (n - 1) / 2));
    for (std::size_t p = 0; p < h.num_pairs(); ++p) {
      CHECK(count_dst(h.pair_pair, static_cast<int>(p)) == static_cast<std::size_t>(2 * (n - 2)));
      CHECK(count_dst(h.atom_pair, static_cast<int>(p)) == 2);
    }
  }
}

TEST_CASE("angle examples and contract") {
  const std::vector<Vec3> pos{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-2, 0, 0}};
  CHECK_THAT(compute_angle({0, 1}, {0, 2}, pos), WithinAbs(std::numbers::pi / 2, 1e-15));
  CHECK_THAT(compute_angle({0, 1}, {0, 3}, pos), WithinAbs(std::numbers::pi, 1e-15));
  CHECK_THAT(compute_angle({1, 0}, {3, 0}, pos), WithinAbs(std::numbers::pi, 1e-15));
  CHECK_THROWS_AS(compute_angle({0, 1}, {2, 3}, pos), std::invalid_argument);
  CHECK_THROWS_AS(compute_angle({0, 1}, {1, 0}, pos), std::invalid_argument);
}

TEST_CASE("angles match the law of cosines") {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = testing::random_cloud(3, 4.0, rng, 0.3);
    const auto pos = m.positions();
    const double a = oracle::dist(pos[0], pos[1]), b = oracle::dist(pos[0], pos[2]), c = oracle::dist(pos[1], pos[2]);
    const double theta = compute_angle({0, 1}, {0, 2}, pos);
    CHECK(theta >= 0.0);
    CHECK(theta <= std::numbers::pi);
    CHECK_THAT(theta, WithinAbs(oracle::law_of_cosines(a, b, c), 1e-9));
  }
}

TEST_CASE("composition ids") {
  CompositionHash h;
  const int ch = h.id(std::vector<int>{6, 1});
  CHECK(h.id(std::vector<int>{1, 6}) == ch);
  const int hh = h.id(std::vector<int>{1, 1});
  const int hydrogen = h.id(std::vector<int>{1});
  CHECK(hh != ch);
  CHECK(h.size(1) == 1);
  CHECK(h.size(2) == 2);
  CHECK(hydrogen == 0);
  CHECK(h.lookup(std::vector<int>{6, 1}) == ch);
  CHECK_THROWS_AS(h.lookup(std::vector<int>{9, 9}), UnknownCompositionError);
  CHECK_FALSE(h.find(std::vector<int>{9}).has_value());

  // H, C, N, O, F give at most 5 + 15 ids, all dense.
  CompositionHash q;
  const auto mols = synth::generate_molecules(300, 8);
  for (const auto& m : mols) hmg_of(m, 3.0, q);
  CHECK(q.size(1) <= 5);
  CHECK(q.size(2) <= 15);
  for (int order : {1, 2})
    for (int id = 0; id < q.size(order); ++id)
      CHECK(q.lookup(q.entries(order)[static_cast<std::size_t>(id)]) == id);
}

TEST_CASE("HMG matches the brute-force builder on random molecules") {
  const auto mols = synth::generate_molecules(60, 31);
  CompositionHash vocab;
  for (double c : {2.0, 3.0, 5.0})
    for (const auto& m : mols) {
      const auto h = hmg_of(m, c, vocab);
      const auto msg = oracle::compare_hmg(h, vocab, oracle::brute_force_hmg(m, c), 1e-9);
      INFO(m.id << " c=" << c);
      CHECK(msg.empty());
    }
}

TEST_CASE("HMG structural invariants") {
  const auto mols = synth::generate_molecules(80, 12);
  CompositionHash vocab;
  for (const auto& m : mols) {
    const double c = 3.0;
    const auto h = hmg_of(m, c, vocab);
    CHECK(symmetric(h.atom_atom));
    CHECK(symmetric(h.pair_pair));
    for (std::size_t p = 0; p < h.num_pairs(); ++p) {
      CHECK(count_dst(h.atom_pair, static_cast<int>(p)) == 2);
      CHECK(h.pair_atoms[p][0] < h.pair_atoms[p][1]);
      CHECK(h.pair_length[p] > 0.0);
      CHECK(h.pair_length[p] < c);
    }
    for (double a : h.pair_pair_angle) {
      CHECK(a >= 0.0);
      CHECK(a <= std::numbers::pi);
    }
    // The 1-1 edge set equals the pair table, once per direction.
    CHECK(h.atom_atom.size() == 2 * h.num_pairs());
  }
}

TEST_CASE("geometry is preserved under rigid motions") {
  const auto mols = synth::generate_molecules(40, 17);
  Rng rng(3);
  for (const auto& m : mols) {
    CompositionHash vocab;
    const auto h = hmg_of(m, 3.0, vocab);
    for (int k = 0; k < 5; ++k) {
      const auto moved = testing::random_motion(m, rng);
      const auto hm = hmg_of(moved, 3.0, vocab);
      // Guard against a pair sitting exactly on the cutoff; none do here.
      REQUIRE(hm.pair_atoms == h.pair_atoms);
      REQUIRE(hm.pair_pair.src == h.pair_pair.src);
      REQUIRE(hm.pair_pair.dst == h.pair_pair.dst);
      for (std::size_t i = 0; i < h.num_pairs(); ++i) CHECK_THAT(hm.pair_length[i], WithinAbs(h.pair_length[i], 1e-9));
      for (std::size_t i = 0; i < h.atom_atom_distance.size(); ++i)
        CHECK_THAT(hm.atom_atom_distance[i], WithinAbs(h.atom_atom_distance[i], 1e-9));
      for (std::size_t i = 0; i < h.pair_pair_angle.size(); ++i)
        CHECK_THAT(hm.pair_pair_angle[i], WithinAbs(h.pair_pair_angle[i], 1e-9));
    }
  }
}

TEST_CASE("relabeling atoms gives a bit-identical canonical graph") {
  const auto mols = synth::generate_molecules(40, 23);
  Rng rng(4);
  for (const auto& m : mols) {
    CompositionHash vocab;
    const auto h = hmg_of(m, 3.0, vocab);
    for (int k = 0; k < 5; ++k) {
      const auto perm = testing::random_permutation(m.atoms.size(), rng);
      const auto hp = hmg_of(testing::permute_atoms(m, perm), 3.0, vocab);
      CHECK(canonical_serialization(hp) == canonical_serialization(relabel_atoms(h, perm)));
    }
  }
}

TEST_CASE("batching") {
  const auto mols = synth::generate_molecules(3, 2);
  CompositionHash vocab;
  std::vector<HeteroMolGraph> gs;
  for (const auto& m : mols) gs.push_back(hmg_of(m, 3.0, vocab));

  const HeteroMolGraph one = batch_hmgs(std::span<const HeteroMolGraph>(gs.data(), 1));
  CHECK(canonical_serialization(one) == canonical_serialization(gs[0]));
  CHECK(std::all_of(one.atom_molecule.begin(), one.atom_molecule.end(), [](int s) { return s == 0; }));

  const std::vector<HeteroMolGraph> twice{gs[1], gs[1]};
  const auto two = batch_hmgs(twice);
  CHECK(two.n_molecules == 2);
  CHECK(two.num_atoms() == 2 * gs[1].num_atoms());
  CHECK(two.num_pairs() == 2 * gs[1].num_pairs());
  CHECK(two.atom_atom.size() == 2 * gs[1].atom_atom.size());
  CHECK(two.pair_pair.size() == 2 * gs[1].pair_pair.size());
  CHECK(two.atom_pair.size() == 2 * gs[1].atom_pair.size());

  // No edge crosses molecules.
  const auto all = batch_hmgs(gs);
  for (std::size_t k = 0; k < all.atom_atom.size(); ++k)
    CHECK(all.atom_molecule[static_cast<std::size_t>(all.atom_atom.src[k])] ==
          all.atom_molecule[static_cast<std::size_t>(all.atom_atom.dst[k])]);
  for (std::size_t k = 0; k < all.pair_pair.size(); ++k)
    CHECK(all.pair_molecule[static_cast<std::size_t>(all.pair_pair.src[k])] ==
          all.pair_molecule[static_cast<std::size_t>(all.pair_pair.dst[k])]);
  for (std::size_t k = 0; k < all.atom_pair.size(); ++k)
    CHECK(all.atom_molecule[static_cast<std::size_t>(all.atom_pair.src[k])] ==
          all.pair_molecule[static_cast<std::size_t>(all.atom_pair.dst[k])]);
}

TEST_CASE("graph cache round-trip") {
  const auto mols = synth::generate_molecules(20, 44);
  CompositionHash vocab;
  std::vector<HeteroMolGraph> gs;
  for (const auto& m : mols) gs.push_back(hmg_of(m, 3.0, vocab));
  io::Archive a("test", 1);
  write_vocabulary(a, vocab);
  write_hmgs(a, gs);
  const auto back = io::Archive::deserialize(a.serialize(), "test", 1);
  const auto v2 = read_vocabulary(back);
  const auto g2 = read_hmgs(back);
  REQUIRE(g2.size() == gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) CHECK(canonical_serialization(g2[i]) == canonical_serialization(gs[i]));
  for (int order : {1, 2}) CHECK(v2.entries(order) == vocab.entries(order));
}

TEST_CASE("message edge counting formula") {
  CHECK(count_message_edges(2, 1) == 2);
  for (int n = 2; n <= 8; ++n) {
    CHECK(count_message_edges(n, 1) == static_cast<std::uint64_t>(n * (n - 1)));
    for (int p : {1, 2}) {
      INFO("N=" << n << " P=" << p);
      CHECK(count_message_edges(n, p) == oracle::brute_force_slots(n, p));
      CHECK(count_message_edges_brute_force(n, p) == oracle::brute_force_slots(n, p));
    }
  }
  for (int n = 3; n <= 8; ++n)
    for (int p = 3; p <= n; ++p) CHECK(count_message_edges(n, p) == oracle::brute_force_slots(n, p));
  CHECK_THROWS_AS(count_message_edges(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(count_message_edges(3, 4), std::invalid_argument);
}

TEST_CASE("formula matches a real HMG built on K_N") {
  Rng rng(6);
  for (int n = 2; n <= 8; ++n) {
    CompositionHash vocab;
    const auto h = hmg_of(testing::random_cloud(n, 3.0, rng), 100.0, vocab);
    // Directed slots: 1-1 edges, 2-2 edges, plus 1-2 memberships counted from
    // both ends.
    const auto slots = h.atom_atom.size() + h.pair_pair.size() + 2 * h.atom_pair.size();
    CHECK(slots == count_message_edges(n, 2));
  }
}
