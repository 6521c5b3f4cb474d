#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pforge/model.hpp"

namespace pforge::model {

// File layout, all integers little-endian:
//   [0, 8)    magic "PFGMODEL"
//   [8, 12)   format_version (u32)
//   [12, 20)  payload length (u64)
//   [20, 28)  FNV-1a 64 checksum of the payload (u64)
//   [28, ...) payload: compact JSON with a fixed field order, counts only
inline constexpr std::string_view kBundleMagic = "PFGMODEL";
inline constexpr std::size_t kBundleHeaderSize = 28;

std::string save_bundle(const ModelBundle& bundle);

// Throws UNSUPPORTED_VERSION or DECODE_ERROR; the latter names a byte offset.
ModelBundle load_bundle(std::string_view bytes);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace pforge::model
