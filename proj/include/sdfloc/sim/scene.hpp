// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sdfloc/map/map_builder.hpp"
#include "sdfloc/map/primitives.hpp"

namespace sdfloc::sim {

/// A synthetic world: analytic primitives plus surface anchor points that
/// serve as feature locations for the track simulator. Every anchor lies
/// on the union isosurface (|scene sdf| <= 1e-9).
struct SyntheticScene {
  std::vector<Primitive> primitives;
  std::vector<Eigen::Vector3d> anchors;
  uint64_t seed = 0;

  double sdf(const Eigen::Vector3d& p) const { return scene_signed_distance(primitives, p); }
};

/// Samples anchor points uniformly over the primitive surfaces inside
/// bounds (planes are sampled on their intersection with the bounds box),
/// rejecting samples buried inside other primitives. Deterministic per
/// seed.
SyntheticScene make_scene(const std::vector<Primitive>& primitives, const MapBounds& bounds,
                          int num_anchors, uint64_t seed);

/// The standard synthetic room used across tests and the demo pipeline:
/// three walls (planes), two boxes and a sphere, roughly 6 x 6 x 3 m.
std::vector<Primitive> room_primitives();

/// Bounds that enclose room_primitives() with a margin of two voxels at
/// the given voxel size.
MapBounds room_bounds(double voxel_size);

}  // namespace sdfloc::sim
