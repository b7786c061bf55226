// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/ingest/split.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hetmol/common/rng.hpp"

namespace hetmol::ingest {

Split split_dataset(std::int64_t n_total, const SplitSpec& spec) {
  if (spec.n_train < 0 || spec.n_val < 0 || spec.n_test < 0)
    throw std::invalid_argument("split sizes must be non-negative");
  if (spec.n_train + spec.n_val + spec.n_test > n_total)
    throw std::invalid_argument("split sizes " + std::to_string(spec.n_train) + "+" + std::to_string(spec.n_val) +
                                "+" + std::to_string(spec.n_test) + " exceed dataset size " +
                                std::to_string(n_total));
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_total));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(order);

  Split split;
  auto take = [&](std::size_t begin, std::int64_t count) {
    std::vector<std::int64_t> out(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(begin + static_cast<std::size_t>(count)));
    std::sort(out.begin(), out.end());
    return out;
  };
  split.train = take(0, spec.n_train);
  split.val = take(static_cast<std::size_t>(spec.n_train), spec.n_val);
  split.test = take(static_cast<std::size_t>(spec.n_train + spec.n_val), spec.n_test);
  return split;
}

}  // namespace hetmol::ingest
