// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "sdfloc/map/primitives.hpp"
#include "sdfloc/map/sdf_map.hpp"

namespace sdfloc {

/// Axis-aligned region to voxelize.
struct MapBounds {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();

  bool empty() const { return (max.array() <= min.array()).any(); }
};

struct MapBuildOptions {
  double voxel_size = 0.1;
  // Defaults follow the map conventions: sigma equal to the voxel size,
  // truncation at 4 voxels. Zero means "use the default".
  double sigma_sdf = 0.0;
  double truncation_distance = 0.0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
};

/// Samples the exact union SDF of the primitives at every voxel center
/// inside bounds, clamped to the truncation band, and finalizes the map.
/// Throws EmptySceneError when primitives is empty and ConfigError on
/// empty bounds or non-positive voxel size.
std::unique_ptr<SdfMap> build_from_analytic(const std::vector<Primitive>& primitives,
                                            const MapBounds& bounds,
                                            const MapBuildOptions& options);

}  // namespace sdfloc
