#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

/// Flat binary model file. Byte layout (all integers little-endian):
///
///   magic    8 bytes  "CTXRRMC\0"
///   version  u32      kContainerVersion
///   kind     str      model kind tag, e.g. "BDS_MEMNN"
///   n_meta   u32      then n_meta pairs of (key str, value str)
///   n_tensor u32      then n_tensor shape entries (name str, rows u64, cols u64)
///   payload           every tensor's values, row-major IEEE-754 binary64,
///                     in shape-table order
///
/// where `str` is a u32 byte length followed by that many UTF-8 bytes.
inline constexpr std::uint32_t kContainerVersion = 1;

struct ModelContainer {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, Matrix>> tensors;

  void set_meta(std::string key, std::string value);
  bool has_meta(std::string_view key) const;
  /// Throws DataError when the key is missing.
  const std::string& meta_value(std::string_view key) const;
  bool has_tensor(std::string_view name) const;
  const Matrix& tensor(std::string_view name) const;
  void add_tensor(std::string name, Matrix m) { tensors.emplace_back(std::move(name), std::move(m)); }
};

std::string encode_container(const ModelContainer& c);
ModelContainer decode_container(std::string_view bytes);

void save_container(const std::filesystem::path& path, const ModelContainer& c);
/// Throws MissingArtifact when the file is absent and DataError when the kind
/// tag differs from `expected_kind` (unless it is empty) or the bytes are malformed.
ModelContainer load_container(const std::filesystem::path& path, std::string_view expected_kind = {});

}  // namespace ctxrr
