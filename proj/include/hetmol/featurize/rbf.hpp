// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hetmol/graph/hmg.hpp"

namespace hetmol::featurize {

/// K Gaussians in exp(-x) space. Centers are equally spaced from exp(-lo)
/// to exp(-hi) inclusive; one width is shared by all of them:
///   width = (2/K * (exp(-lo) - exp(-hi)))^-2.
struct RbfBank {
  int size = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> centers;
  double width = 0.0;
};

/// Throws std::invalid_argument when k < 2 or lo >= hi.
RbfBank make_bank(double lo, double hi, int k);

/// out[k] = exp(-width * (exp(-x) - centers[k])^2). Inputs outside [lo, hi]
/// are evaluated as-is.
void rbf_expand(double x, const RbfBank& bank, std::span<double> out);
std::vector<double> rbf_expand(double x, const RbfBank& bank);

/// Smooth cosine cutoff 0.5 * (cos(pi d / c) + 1); 1 at d <= 0, 0 at d >= c.
double cutoff_envelope(double d, double c);

struct FeatureBanks {
  RbfBank distance;  // 1-1 edges, [0, c]
  RbfBank length;    // 2-body lengths, [0, c]
  RbfBank angle;     // 2-2 edges, [0, pi]
  double cutoff = 0.0;

  static FeatureBanks standard(double cutoff, int k_distance, int k_length, int k_angle);
};

/// Row-major continuous features of one (possibly batched) HMG.
struct FeatureTables {
  int k_distance = 0;
  int k_length = 0;
  int k_angle = 0;
  std::vector<double> atom_atom;  // (|E11|, k_distance), envelope-damped
  std::vector<double> pair;       // (|V2|, k_length)
  std::vector<double> pair_pair;  // (|E22|, k_angle)
};

FeatureTables featurize_hmg(const graph::HeteroMolGraph& hmg, const FeatureBanks& banks);

/// Row concatenation matching batch_hmgs on the same graphs.
FeatureTables batch_features(std::span<const FeatureTables* const> tables);

}  // namespace hetmol::featurize
