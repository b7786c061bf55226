// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/common/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hetmol::io {

static_assert(std::endian::native == std::endian::little, "archive format assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "HMOLARCH";

std::string shape_string(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
void write_pod(std::string& out, const T& value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  out.append(p, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ArchiveError("archive truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::int64_t product(const std::vector<std::int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

}  // namespace

std::int64_t Array::element_count() const {
  switch (dtype) {
    case DType::kFloat64: return static_cast<std::int64_t>(f64.size());
    case DType::kInt64: return static_cast<std::int64_t>(i64.size());
    case DType::kBytes: return static_cast<std::int64_t>(bytes.size());
  }
  return 0;
}

Archive::Archive(std::string kind, std::uint32_t version) : kind_(std::move(kind)), version_(version) {}

void Archive::put_f64(const std::string& name, std::vector<std::int64_t> shape, std::span<const double> values) {
  if (product(shape) != static_cast<std::int64_t>(values.size()))
    throw ArchiveError("array '" + name + "': shape " + shape_string(shape) + " does not match " +
                       std::to_string(values.size()) + " values");
  Array a;
  a.dtype = DType::kFloat64;
  a.shape = std::move(shape);
  a.f64.assign(values.begin(), values.end());
  arrays_[name] = std::move(a);
}

void Archive::put_i64(const std::string& name, std::vector<std::int64_t> shape, std::span<const std::int64_t> values) {
  if (product(shape) != static_cast<std::int64_t>(values.size()))
    throw ArchiveError("array '" + name + "': shape " + shape_string(shape) + " does not match " +
                       std::to_string(values.size()) + " values");
  Array a;
  a.dtype = DType::kInt64;
  a.shape = std::move(shape);
  a.i64.assign(values.begin(), values.end());
  arrays_[name] = std::move(a);
}

void Archive::put_bytes(const std::string& name, std::string_view bytes) {
  Array a;
  a.dtype = DType::kBytes;
  a.shape = {static_cast<std::int64_t>(bytes.size())};
  a.bytes.assign(bytes);
  arrays_[name] = std::move(a);
}

void Archive::put_scalar(const std::string& name, double value) { put_f64(name, {1}, std::span<const double>(&value, 1)); }

void Archive::put_scalar(const std::string& name, std::int64_t value) {
  put_i64(name, {1}, std::span<const std::int64_t>(&value, 1));
}

bool Archive::contains(const std::string& name) const { return arrays_.count(name) != 0; }

const Array& Archive::get(const std::string& name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end()) throw ArchiveError("archive '" + kind_ + "' has no array '" + name + "'");
  return it->second;
}

namespace {
void check(const Array& a, const std::string& name, DType dtype, const std::vector<std::int64_t>& expected) {
  if (a.dtype != dtype) throw ArchiveError("array '" + name + "' has unexpected dtype");
  if (!expected.empty() && a.shape != expected)
    throw ArchiveError("array '" + name + "' has shape " + shape_string(a.shape) + ", expected " +
                       shape_string(expected));
}
}  // namespace

const std::vector<double>& Archive::f64(const std::string& name, const std::vector<std::int64_t>& expected_shape) const {
  const Array& a = get(name);
  check(a, name, DType::kFloat64, expected_shape);
  return a.f64;
}

const std::vector<std::int64_t>& Archive::i64(const std::string& name,
                                              const std::vector<std::int64_t>& expected_shape) const {
  const Array& a = get(name);
  check(a, name, DType::kInt64, expected_shape);
  return a.i64;
}

const std::string& Archive::bytes(const std::string& name) const {
  const Array& a = get(name);
  check(a, name, DType::kBytes, {});
  return a.bytes;
}

double Archive::scalar_f64(const std::string& name) const { return f64(name, {1})[0]; }

std::int64_t Archive::scalar_i64(const std::string& name) const { return i64(name, {1})[0]; }

std::vector<std::string> Archive::names_with_prefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (auto it = arrays_.lower_bound(std::string(prefix)); it != arrays_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    out.push_back(it->first);
  }
  return out;
}

std::string Archive::serialize() const {
  std::string out(kMagic);
  write_pod(out, static_cast<std::uint32_t>(kind_.size()));
  out += kind_;
  write_pod(out, version_);
  write_pod(out, static_cast<std::uint64_t>(arrays_.size()));
  for (const auto& [name, a] : arrays_) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    write_pod(out, static_cast<std::uint8_t>(a.dtype));
    write_pod(out, static_cast<std::uint32_t>(a.shape.size()));
    for (auto d : a.shape) write_pod(out, d);
    switch (a.dtype) {
      case DType::kFloat64:
        write_pod(out, static_cast<std::uint64_t>(a.f64.size() * sizeof(double)));
        out.append(reinterpret_cast<const char*>(a.f64.data()), a.f64.size() * sizeof(double));
        break;
      case DType::kInt64:
        write_pod(out, static_cast<std::uint64_t>(a.i64.size() * sizeof(std::int64_t)));
        out.append(reinterpret_cast<const char*>(a.i64.data()), a.i64.size() * sizeof(std::int64_t));
        break;
      case DType::kBytes:
        write_pod(out, static_cast<std::uint64_t>(a.bytes.size()));
        out += a.bytes;
        break;
    }
  }
  return out;
}

Archive Archive::deserialize(std::string_view data, std::string_view expected_kind, std::uint32_t expected_version) {
  Reader r(data);
  if (r.take(kMagic.size()) != kMagic) throw ArchiveError("not an archive (bad magic)");
  const auto kind_len = r.pod<std::uint32_t>();
  std::string kind(r.take(kind_len));
  const auto version = r.pod<std::uint32_t>();
  if (kind != expected_kind)
    throw ArchiveError("archive kind '" + kind + "' where '" + std::string(expected_kind) + "' was expected");
  if (version != expected_version)
    throw ArchiveError("archive '" + kind + "' version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(expected_version) + ")");
  Archive archive(std::move(kind), version);
  const auto count = r.pod<std::uint64_t>();
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto name_len = r.pod<std::uint32_t>();
    std::string name(r.take(name_len));
    Array a;
    a.dtype = static_cast<DType>(r.pod<std::uint8_t>());
    const auto rank = r.pod<std::uint32_t>();
    for (std::uint32_t i = 0; i < rank; ++i) a.shape.push_back(r.pod<std::int64_t>());
    const auto nbytes = r.pod<std::uint64_t>();
    auto payload = r.take(nbytes);
    switch (a.dtype) {
      case DType::kFloat64:
        a.f64.resize(nbytes / sizeof(double));
        std::memcpy(a.f64.data(), payload.data(), nbytes);
        break;
      case DType::kInt64:
        a.i64.resize(nbytes / sizeof(std::int64_t));
        std::memcpy(a.i64.data(), payload.data(), nbytes);
        break;
      case DType::kBytes:
        a.bytes.assign(payload);
        break;
      default:
        throw ArchiveError("array '" + name + "' has unknown dtype");
    }
    if (a.dtype != DType::kBytes && product(a.shape) != a.element_count())
      throw ArchiveError("array '" + name + "' payload does not match shape " + shape_string(a.shape));
    archive.arrays_[name] = std::move(a);
  }
  if (!r.done()) throw ArchiveError("trailing bytes after archive");
  return archive;
}

void Archive::save(const std::filesystem::path& path) const {
  const std::string data = serialize();
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArchiveError("cannot write " + tmp);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ArchiveError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Archive Archive::load(const std::filesystem::path& path, std::string_view expected_kind,
                      std::uint32_t expected_version) {
  return deserialize(read_file_bytes(path), expected_kind, expected_version);
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hetmol::io
