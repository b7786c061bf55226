// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetmol::io {

class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DType : std::uint8_t { kFloat64 = 1, kInt64 = 2, kBytes = 3 };

struct Array {
  DType dtype = DType::kFloat64;
  std::vector<std::int64_t> shape;
  std::vector<double> f64;
  std::vector<std::int64_t> i64;
  std::string bytes;

  std::int64_t element_count() const;
};

/// Versioned container of named numeric arrays. Arrays are written in name
/// order, so two archives with equal contents serialize to identical bytes.
///
/// Layout (little endian):
///   "HMOLARCH"  u32 kind_len  kind  u32 version  u64 count
///   per array:  u32 name_len  name  u8 dtype  u32 rank  i64 dims[rank]
///               u64 payload_bytes  payload
class Archive {
 public:
  Archive(std::string kind, std::uint32_t version);

  const std::string& kind() const { return kind_; }
  std::uint32_t version() const { return version_; }

  void put_f64(const std::string& name, std::vector<std::int64_t> shape, std::span<const double> values);
  void put_i64(const std::string& name, std::vector<std::int64_t> shape, std::span<const std::int64_t> values);
  void put_bytes(const std::string& name, std::string_view bytes);
  void put_scalar(const std::string& name, double value);
  void put_scalar(const std::string& name, std::int64_t value);

  bool contains(const std::string& name) const;
  const Array& get(const std::string& name) const;

  /// Typed accessors. They throw ArchiveError naming the array when it is
  /// missing, has the wrong dtype, or (when given) the wrong shape.
  const std::vector<double>& f64(const std::string& name, const std::vector<std::int64_t>& expected_shape = {}) const;
  const std::vector<std::int64_t>& i64(const std::string& name, const std::vector<std::int64_t>& expected_shape = {}) const;
  const std::string& bytes(const std::string& name) const;
  double scalar_f64(const std::string& name) const;
  std::int64_t scalar_i64(const std::string& name) const;

  std::vector<std::string> names_with_prefix(std::string_view prefix) const;
  const std::map<std::string, Array>& arrays() const { return arrays_; }

  std::string serialize() const;
  static Archive deserialize(std::string_view data, std::string_view expected_kind, std::uint32_t expected_version);

  void save(const std::filesystem::path& path) const;
  static Archive load(const std::filesystem::path& path, std::string_view expected_kind, std::uint32_t expected_version);

 private:
  std::string kind_;
  std::uint32_t version_;
  std::map<std::string, Array> arrays_;
};

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace hetmol::io
