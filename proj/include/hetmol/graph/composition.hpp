// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetmol::graph {

class UnknownCompositionError : public std::out_of_range {
 public:
  explicit UnknownCompositionError(std::vector<int> composition);
  const std::vector<int>& composition() const { return composition_; }

 private:
  std::vector<int> composition_;
};

/// Dense ids for sorted atomic-number multisets, one id space per order
/// (multiset size). Ids are allocated in first-seen order.
class CompositionHash {
 public:
  static constexpr int kMaxOrder = 2;

  /// Id of the multiset, allocating the next id when unseen.
  int id(std::span<const int> atomic_numbers);
  /// Id of the multiset; throws UnknownCompositionError when unseen.
  int lookup(std::span<const int> atomic_numbers) const;
  std::optional<int> find(std::span<const int> atomic_numbers) const;

  int size(int order) const;
  /// Multisets of one order indexed by id.
  const std::vector<std::vector<int>>& entries(int order) const;

  static CompositionHash from_entries(const std::vector<std::vector<int>>& order1,
                                      const std::vector<std::vector<int>>& order2);

  static std::string describe(std::span<const int> atomic_numbers);

 private:
  static std::vector<int> canonical(std::span<const int> atomic_numbers);
  std::map<std::vector<int>, int> ids_[kMaxOrder];
  std::vector<std::vector<int>> entries_[kMaxOrder];
};

}  // namespace hetmol::graph
