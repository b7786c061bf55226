// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace hetmol::ingest {

struct SplitSpec {
  std::int64_t n_train = 0;
  std::int64_t n_val = 0;
  std::int64_t n_test = 0;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
  std::vector<std::int64_t> test;
};

/// Disjoint, size-exact index sets drawn from one seeded shuffle of
/// [0, n_total). Each set is returned in ascending order.
Split split_dataset(std::int64_t n_total, const SplitSpec& spec);

}  // namespace hetmol::ingest
