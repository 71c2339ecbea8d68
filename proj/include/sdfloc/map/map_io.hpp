// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "sdfloc/map/sdf_map.hpp"

namespace sdfloc {

// Binary map format, little-endian:
//   magic "SDFM", format version u32,
//   voxel_size f64, sigma_sdf f64, truncation f64, origin 3 x f64,
//   block count u64,
//   per block: block coord 3 x i32, then 16^3 pairs of (distance f32,
//   observed u8) in x-fastest order.
// Save -> load round trips are bit-exact on stored distances; blocks are
// written in sorted coordinate order so identical maps produce identical
// files.

inline constexpr uint32_t kMapFormatVersion = 1;

void save_map(const SdfMap& map, const std::string& path);

/// Loads and finalizes a map. Throws IoError on malformed files.
std::unique_ptr<SdfMap> load_map(const std::string& path);

}  // namespace sdfloc
