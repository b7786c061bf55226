// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/featurize/rbf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetmol::featurize {

RbfBank make_bank(double lo, double hi, int k) {
  if (k < 2) throw std::invalid_argument("RBF bank needs at least 2 functions");
  if (!(lo < hi)) throw std::invalid_argument("RBF bank needs lo < hi");
  RbfBank bank;
  bank.size = k;
  bank.lo = lo;
  bank.hi = hi;
  const double start = std::exp(-lo);
  const double stop = std::exp(-hi);
  bank.centers.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) bank.centers[static_cast<std::size_t>(i)] = start + (stop - start) * i / (k - 1);
  bank.centers.back() = stop;
  const double spread = 2.0 / k * (start - stop);
  bank.width = 1.0 / (spread * spread);
  return bank;
}

void rbf_expand(double x, const RbfBank& bank, std::span<double> out) {
  if (out.size() != bank.centers.size()) throw std::invalid_argument("rbf_expand: output size mismatch");
  const double ex = std::exp(-x);
  for (std::size_t k = 0; k < bank.centers.size(); ++k) {
    const double diff = ex - bank.centers[k];
    out[k] = std::exp(-bank.width * diff * diff);
  }
}

std::vector<double> rbf_expand(double x, const RbfBank& bank) {
  std::vector<double> out(bank.centers.size());
  rbf_expand(x, bank, out);
  return out;
}

double cutoff_envelope(double d, double c) {
  if (d <= 0.0) return 1.0;
  if (d >= c) return 0.0;
  return 0.5 * (std::cos(std::numbers::pi * d / c) + 1.0);
}

FeatureBanks FeatureBanks::standard(double cutoff, int k_distance, int k_length, int k_angle) {
  FeatureBanks b;
  b.cutoff = cutoff;
  b.distance = make_bank(0.0, cutoff, k_distance);
  b.length = make_bank(0.0, cutoff, k_length);
  b.angle = make_bank(0.0, std::numbers::pi, k_angle);
  return b;
}

FeatureTables featurize_hmg(const graph::HeteroMolGraph& hmg, const FeatureBanks& banks) {
  FeatureTables t;
  t.k_distance = banks.distance.size;
  t.k_length = banks.length.size;
  t.k_angle = banks.angle.size;
  const auto kd = static_cast<std::size_t>(t.k_distance);
  const auto kl = static_cast<std::size_t>(t.k_length);
  const auto ka = static_cast<std::size_t>(t.k_angle);

  t.atom_atom.resize(hmg.atom_atom.size() * kd);
  for (std::size_t e = 0; e < hmg.atom_atom.size(); ++e) {
    const double d = hmg.atom_atom_distance[e];
    std::span<double> row(t.atom_atom.data() + e * kd, kd);
    rbf_expand(d, banks.distance, row);
    const double psi = cutoff_envelope(d, banks.cutoff);
    for (double& v : row) v *= psi;
  }
  t.pair.resize(hmg.num_pairs() * kl);
  for (std::size_t p = 0; p < hmg.num_pairs(); ++p)
    rbf_expand(hmg.pair_length[p], banks.length, std::span<double>(t.pair.data() + p * kl, kl));
  t.pair_pair.resize(hmg.pair_pair.size() * ka);
  for (std::size_t e = 0; e < hmg.pair_pair.size(); ++e)
    rbf_expand(hmg.pair_pair_angle[e], banks.angle, std::span<double>(t.pair_pair.data() + e * ka, ka));
  return t;
}

FeatureTables batch_features(std::span<const FeatureTables* const> tables) {
  FeatureTables out;
  if (tables.empty()) return out;
  out.k_distance = tables[0]->k_distance;
  out.k_length = tables[0]->k_length;
  out.k_angle = tables[0]->k_angle;
  for (const auto* t : tables) {
    if (t->k_distance != out.k_distance || t->k_length != out.k_length || t->k_angle != out.k_angle)
      throw std::invalid_argument("batch_features: feature widths differ");
    out.atom_atom.insert(out.atom_atom.end(), t->atom_atom.begin(), t->atom_atom.end());
    out.pair.insert(out.pair.end(), t->pair.begin(), t->pair.end());
    out.pair_pair.insert(out.pair_pair.end(), t->pair_pair.begin(), t->pair_pair.end());
  }
  return out;
}

}  // namespace hetmol::featurize
