// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/synth/qm9_like.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hetmol/common/rng.hpp"

namespace hetmol::synth {

using ingest::Molecule;
using ingest::Property;
using ingest::Vec3;

ingest::ReferenceTable qm9_atomrefs() {
  struct Row {
    int z;
    double zpve, u0, u, h, g, cv;
  };
  static constexpr Row kRows[] = {
      {1, 0.0, -0.500273, -0.498857, -0.497912, -0.510927, 2.981},
      {6, 0.0, -37.846772, -37.845355, -37.844411, -37.861317, 2.981},
      {7, 0.0, -54.583861, -54.582445, -54.581501, -54.598897, 2.981},
      {8, 0.0, -75.064579, -75.063162, -75.062219, -75.079532, 2.981},
      {9, 0.0, -99.718730, -99.717314, -99.716370, -99.733544, 2.981},
  };
  ingest::ReferenceTable t;
  for (const auto& r : kRows) {
    t.set(r.z, Property::kZpve, r.zpve);
    t.set(r.z, Property::kU0, r.u0);
    t.set(r.z, Property::kU, r.u);
    t.set(r.z, Property::kH, r.h);
    t.set(r.z, Property::kG, r.g);
    t.set(r.z, Property::kCv, r.cv);
  }
  return t;
}

namespace {

struct Element {
  int z;
  int valence;
  double radius;           // covalent radius, Angstrom
  double electronegativity;
  double polarizability;   // bohr^3
};

constexpr Element kH{1, 1, 0.31, 2.20, 4.5};
constexpr Element kHeavy[] = {
    {6, 4, 0.76, 2.55, 11.3},
    {7, 3, 0.71, 3.04, 7.4},
    {8, 2, 0.66, 3.44, 5.3},
    {9, 1, 0.57, 3.98, 3.7},
};

const Element& element_of(int z) {
  if (z == 1) return kH;
  for (const auto& e : kHeavy)
    if (e.z == z) return e;
  throw std::invalid_argument("synthetic generator has no element " + std::to_string(z));
}

double dist(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

Vec3 random_direction(Rng& rng) {
  for (;;) {
    const Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-3 && n <= 1.0) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

// Chooses a heavy element: mostly carbon, some N and O, few F.
const Element& draw_heavy(Rng& rng, bool allow_fluorine) {
  const double u = rng.uniform() * (allow_fluorine ? 1.0 : 0.9);
  if (u < 0.60) return kHeavy[0];
  if (u < 0.75) return kHeavy[1];
  if (u < 0.90) return kHeavy[2];
  return kHeavy[3];
}

struct Builder {
  std::vector<int> z;
  std::vector<Vec3> pos;
  std::vector<int> free_valence;

  // Places an atom bonded to `parent`; false when every try clashes.
  bool attach(const Element& e, int parent, Rng& rng) {
    const Element& pe = element_of(z[static_cast<std::size_t>(parent)]);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double length = pe.radius + e.radius + rng.uniform(-0.03, 0.03);
      const Vec3 d = random_direction(rng);
      const Vec3& p = pos[static_cast<std::size_t>(parent)];
      const Vec3 q{p[0] + length * d[0], p[1] + length * d[1], p[2] + length * d[2]};
      bool clash = false;
      for (std::size_t k = 0; k < pos.size() && !clash; ++k) {
        if (static_cast<int>(k) == parent) continue;
        const bool light = e.z == 1 || z[k] == 1;
        clash = dist(q, pos[k]) < (light ? 1.45 : 2.1);
      }
      if (clash) continue;
      z.push_back(e.z);
      pos.push_back(q);
      free_valence.push_back(e.valence - 1);
      --free_valence[static_cast<std::size_t>(parent)];
      return true;
    }
    return false;
  }
};

double taper(double d, double c) { return d >= c ? 0.0 : 0.5 * (std::cos(std::numbers::pi * d / c) + 1.0); }

// Interaction energy in Hartree.
double interaction_energy(const std::vector<int>& z, const std::vector<Vec3>& pos) {
  const std::size_t n = z.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(pos[i], pos[j]);
      if (d >= 3.0) continue;
      const auto& a = element_of(z[i]);
      const auto& b = element_of(z[j]);
      const double r0 = a.radius + b.radius;
      const double depth = 0.06 + 0.015 * (a.valence + b.valence) + 0.01 * std::abs(a.electronegativity - b.electronegativity);
      const double x = 1.0 - std::exp(-1.8 * (d - r0));
      e += depth * (x * x - 1.0) * taper(d, 3.0);
    }
  // Bond-angle strain around every atom, bonds being pairs within 1.25 r0.
  const double ideal = std::cos(109.5 * std::numbers::pi / 180.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::size_t> nb;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == c) continue;
      const double r0 = element_of(z[c]).radius + element_of(z[k]).radius;
      if (dist(pos[c], pos[k]) < 1.25 * r0) nb.push_back(k);
    }
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        const auto& p = pos[c];
        const auto& u = pos[nb[a]];
        const auto& v = pos[nb[b]];
        const Vec3 du{u[0] - p[0], u[1] - p[1], u[2] - p[2]};
        const Vec3 dv{v[0] - p[0], v[1] - p[1], v[2] - p[2]};
        const double cosang = (du[0] * dv[0] + du[1] * dv[1] + du[2] * dv[2]) / (dist(u, p) * dist(v, p));
        e += 0.02 * (cosang - ideal) * (cosang - ideal);
      }
  }
  return e;
}

ingest::PropertyMap targets_for(const std::vector<int>& z, const std::vector<Vec3>& pos,
                                const ingest::ReferenceTable& refs) {
  const std::size_t n = z.size();
  double ref_u0 = 0, ref_u = 0, ref_h = 0, ref_g = 0, ref_cv = 0;
  Vec3 com{0, 0, 0};
  int heavy = 0, hydrogens = 0, hetero = 0;
  double alpha = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ref_u0 += refs.at(z[i], Property::kU0);
    ref_u += refs.at(z[i], Property::kU);
    ref_h += refs.at(z[i], Property::kH);
    ref_g += refs.at(z[i], Property::kG);
    ref_cv += refs.at(z[i], Property::kCv);
    for (int k = 0; k < 3; ++k) com[static_cast<std::size_t>(k)] += pos[i][static_cast<std::size_t>(k)] / static_cast<double>(n);
    if (z[i] == 1)
      ++hydrogens;
    else
      ++heavy;
    if (z[i] == 7 || z[i] == 8 || z[i] == 9) ++hetero;
    alpha += element_of(z[i]).polarizability;
  }
  double r2 = 0;
  Vec3 dipole{0, 0, 0};
  double mean_en = 0;
  for (int zi : z) mean_en += element_of(zi).electronegativity / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = -0.4 * (element_of(z[i]).electronegativity - mean_en);
    for (std::size_t k = 0; k < 3; ++k) {
      const double rel = pos[i][k] - com[k];
      r2 += rel * rel;
      dipole[k] += q * rel / 0.20819434;  // e*Angstrom -> Debye
    }
  }
  const double e_int = interaction_energy(z, pos);
  const double zpve = 0.0105 * hydrogens + 0.0062 * heavy;
  const double thermal = 0.0014 * static_cast<double>(n);
  ingest::PropertyMap t;
  t[Property::kMu] = std::sqrt(dipole[0] * dipole[0] + dipole[1] * dipole[1] + dipole[2] * dipole[2]);
  t[Property::kAlpha] = alpha + 0.8 * e_int;
  t[Property::kHomo] = -0.26 - 0.008 * hetero + 0.01 * std::tanh(e_int);
  t[Property::kLumo] = 0.02 - 0.004 * heavy + 0.006 * hetero;
  t[Property::kGap] = t[Property::kLumo] - t[Property::kHomo];
  t[Property::kR2] = r2;
  t[Property::kZpve] = zpve;
  t[Property::kU0] = ref_u0 + e_int + zpve;
  t[Property::kU] = ref_u + e_int + zpve + thermal;
  t[Property::kH] = ref_h + e_int + zpve + thermal;
  t[Property::kG] = ref_g + e_int + zpve + thermal - 0.0009 * static_cast<double>(n);
  t[Property::kCv] = ref_cv + 1.1 * heavy + 0.35 * hydrogens;
  return t;
}

}  // namespace

std::vector<Molecule> generate_molecules(std::size_t count, std::uint64_t seed, const GeneratorOptions& options) {
  if (options.min_heavy_atoms < 1 || options.max_heavy_atoms < options.min_heavy_atoms)
    throw std::invalid_argument("heavy-atom range must satisfy 1 <= min <= max");
  Rng rng(seed);
  const auto refs = qm9_atomrefs();
  std::vector<Molecule> out;
  out.reserve(count);
  while (out.size() < count) {
    const int span = options.max_heavy_atoms - options.min_heavy_atoms + 1;
    const int n_heavy = options.min_heavy_atoms + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    Builder b;
    const Element& first = draw_heavy(rng, n_heavy == 1);
    b.z.push_back(first.z);
    b.pos.push_back({0, 0, 0});
    b.free_valence.push_back(first.valence);
    bool ok = true;
    for (int k = 1; k < n_heavy && ok; ++k) {
      std::vector<int> open;
      for (std::size_t i = 0; i < b.z.size(); ++i)
        if (b.free_valence[i] > 0) open.push_back(static_cast<int>(i));
      if (open.empty()) {
        ok = false;
        break;
      }
      const int parent = open[rng.below(open.size())];
      ok = b.attach(draw_heavy(rng, true), parent, rng);
    }
    const std::size_t heavy_count = b.z.size();
    for (std::size_t i = 0; i < heavy_count && ok; ++i)
      while (ok && b.free_valence[i] > 0) ok = b.attach(kH, static_cast<int>(i), rng);
    if (!ok || static_cast<int>(heavy_count) != n_heavy) continue;

    Molecule m;
    m.id = std::to_string(out.size() + 1);
    for (std::size_t i = 0; i < b.z.size(); ++i) m.atoms.push_back({b.z[i], b.pos[i]});
    m.targets = targets_for(b.z, b.pos, refs);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace hetmol::synth
