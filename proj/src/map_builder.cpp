// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/map/map_builder.hpp"

#include <cmath>

#include "sdfloc/errors.hpp"

namespace sdfloc {

std::unique_ptr<SdfMap> build_from_analytic(const std::vector<Primitive>& primitives,
                                            const MapBounds& bounds,
                                            const MapBuildOptions& options) {
  if (primitives.empty()) {
    throw EmptySceneError("build_from_analytic: primitive list is empty");
  }
  if (bounds.empty()) {
    throw ConfigError("build_from_analytic: bounds are empty");
  }
  if (options.voxel_size <= 0.0) {
    throw ConfigError("build_from_analytic: voxel_size must be positive");
  }
  const double sigma = options.sigma_sdf > 0.0 ? options.sigma_sdf : options.voxel_size;
  const double truncation =
      options.truncation_distance > 0.0 ? options.truncation_distance : 4.0 * options.voxel_size;

  auto map = std::make_unique<SdfMap>(options.voxel_size, options.origin, sigma, truncation);
  const VoxelIndex lo = map->voxel_index_of(bounds.min);
  const VoxelIndex hi = map->voxel_index_of(bounds.max);
  for (int32_t z = lo.z; z <= hi.z; ++z) {
    for (int32_t y = lo.y; y <= hi.y; ++y) {
      for (int32_t x = lo.x; x <= hi.x; ++x) {
        const VoxelIndex v{x, y, z};
        map->set_voxel(v, scene_signed_distance(primitives, map->voxel_center(v)));
      }
    }
  }
  map->finalize();
  return map;
}

}  // namespace sdfloc
