// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/graph/counting.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetmol::graph {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

namespace {
void check_args(int n, int max_order) {
  if (max_order < 1 || max_order > n)
    throw std::invalid_argument("max order must satisfy 1 <= P <= N (got N=" + std::to_string(n) +
                                ", P=" + std::to_string(max_order) + ")");
}
}  // namespace

std::uint64_t count_message_edges(int n, int max_order) {
  check_args(n, max_order);
  std::uint64_t total = 0;
  for (int p = 1; p <= max_order; ++p) {
    std::uint64_t per_node = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(n - p);
    for (int q = 1; q < p; ++q) per_node += binomial(p, q);
    for (int q = p + 1; q <= max_order; ++q) per_node += binomial(n - p, q - p);
    total += binomial(n, p) * per_node;
  }
  return total;
}

std::uint64_t count_message_edges_brute_force(int n, int max_order) {
  check_args(n, max_order);
  if (n > 20) throw std::invalid_argument("brute-force count is limited to N <= 20");
  std::vector<std::uint32_t> nodes;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask)
    if (std::popcount(mask) <= max_order) nodes.push_back(mask);

  std::uint64_t slots = 0;
  for (auto a : nodes) {
    const int p = std::popcount(a);
    for (auto b : nodes) {
      if (a == b) continue;
      const int q = std::popcount(b);
      bool neighbor = false;
      if (q < p)
        neighbor = (a & b) == b;
      else if (q > p)
        neighbor = (a & b) == a;
      else
        neighbor = std::popcount(a & b) == p - 1;
      if (neighbor) ++slots;
    }
  }
  return slots;
}

}  // namespace hetmol::graph
