// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/graph/composition.hpp"

#include <algorithm>

#include "hetmol/ingest/elements.hpp"

namespace hetmol::graph {

UnknownCompositionError::UnknownCompositionError(std::vector<int> composition)
    : std::out_of_range("composition " + CompositionHash::describe(composition) + " is not in the vocabulary"),
      composition_(std::move(composition)) {}

std::vector<int> CompositionHash::canonical(std::span<const int> atomic_numbers) {
  if (atomic_numbers.empty() || atomic_numbers.size() > static_cast<std::size_t>(kMaxOrder))
    throw std::invalid_argument("composition size must be 1 or 2");
  std::vector<int> key(atomic_numbers.begin(), atomic_numbers.end());
  std::sort(key.begin(), key.end());
  return key;
}

int CompositionHash::id(std::span<const int> atomic_numbers) {
  auto key = canonical(atomic_numbers);
  const auto order = key.size() - 1;
  auto [it, inserted] = ids_[order].try_emplace(key, static_cast<int>(entries_[order].size()));
  if (inserted) entries_[order].push_back(std::move(key));
  return it->second;
}

std::optional<int> CompositionHash::find(std::span<const int> atomic_numbers) const {
  auto key = canonical(atomic_numbers);
  const auto& ids = ids_[key.size() - 1];
  auto it = ids.find(key);
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

int CompositionHash::lookup(std::span<const int> atomic_numbers) const {
  if (auto v = find(atomic_numbers)) return *v;
  throw UnknownCompositionError(canonical(atomic_numbers));
}

int CompositionHash::size(int order) const {
  if (order < 1 || order > kMaxOrder) throw std::invalid_argument("order must be 1 or 2");
  return static_cast<int>(entries_[order - 1].size());
}

const std::vector<std::vector<int>>& CompositionHash::entries(int order) const {
  if (order < 1 || order > kMaxOrder) throw std::invalid_argument("order must be 1 or 2");
  return entries_[order - 1];
}

CompositionHash CompositionHash::from_entries(const std::vector<std::vector<int>>& order1,
                                              const std::vector<std::vector<int>>& order2) {
  CompositionHash h;
  for (const auto& e : order1) {
    if (e.size() != 1) throw std::invalid_argument("order-1 vocabulary entry must have one atom");
    h.id(e);
  }
  for (const auto& e : order2) {
    if (e.size() != 2) throw std::invalid_argument("order-2 vocabulary entry must have two atoms");
    h.id(e);
  }
  return h;
}

std::string CompositionHash::describe(std::span<const int> atomic_numbers) {
  std::string s = "{";
  for (std::size_t i = 0; i < atomic_numbers.size(); ++i) {
    if (i) s += ",";
    s += std::string(ingest::element_symbol(atomic_numbers[i]));
  }
  return s + "}";
}

}  // namespace hetmol::graph
