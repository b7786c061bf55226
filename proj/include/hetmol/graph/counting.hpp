// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace hetmol::graph {

std::uint64_t binomial(int n, int k);

/// Closed-form count of directed neighbor slots in the order-<=max_order
/// HMG of a complete graph on n atoms:
///   sum_p C(n,p) * ( sum_{q<p} C(p,q) + sum_{q>p} C(n-p, q-p) + p(n-p) ).
/// Throws std::invalid_argument unless 1 <= max_order <= n.
std::uint64_t count_message_edges(int n, int max_order);

/// Same count by enumerating every p-subset of K_n and testing the neighbor
/// relations directly (subset for different orders, p-1 shared atoms for the
/// same order). Exponential in n; intended for n <= 12.
std::uint64_t count_message_edges_brute_force(int n, int max_order);

}  // namespace hetmol::graph
