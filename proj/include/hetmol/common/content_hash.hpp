// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hetmol {

/// SHA-1 over "blob <size>\0<content>", the object id git assigns to a file.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

}  // namespace hetmol
