// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "sdfloc/map/map_builder.hpp"
#include "sdfloc/map/sdf_map.hpp"
#include "sdfloc/sim/random.hpp"

using namespace sdfloc;

namespace {

std::unique_ptr<SdfMap> box_scene_map(std::vector<Primitive>* out_prims = nullptr) {
  const std::vector<Primitive> prims = {Box{{0.0, 0.0, 0.0}, {1.0, 1.4, 0.8}},
                                        Box{{1.6, 0.5, 0.2}, {0.6, 0.6, 1.2}}};
  if (out_prims != nullptr) {
    *out_prims = prims;
  }
  MapBuildOptions options;
  options.voxel_size = 0.05;
  options.truncation_distance = 1.0;
  MapBounds bounds;
  bounds.min = Eigen::Vector3d(-2.5, -2.5, -2.5);
  bounds.max = Eigen::Vector3d(3.5, 2.5, 2.5);
  return build_from_analytic(prims, bounds, options);
}

}  // namespace

TEST_CASE("raycast: axis ray into the unit sphere") {
  MapBuildOptions options;
  options.voxel_size = 0.05;
  options.truncation_distance = 1.0;
  MapBounds bounds;
  bounds.min = Eigen::Vector3d::Constant(-1.6);
  bounds.max = Eigen::Vector3d::Constant(1.6);
  // Keep the origin of the cast outside the map: entry through unobserved
  // space must be tolerated.
  const auto map = build_from_analytic({Sphere{{0, 0, 0}, 1.0}}, bounds, options);

  const auto hit = map->raycast({0, 0, -3.0}, {0, 0, 1.0}, 10.0);
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->depth - 2.0) <= map->voxel_size());
  CHECK(std::abs(hit->point.z() + 1.0) <= map->voxel_size());

  // Pointing away from every surface: miss.
  CHECK(!map->raycast({0, 0, -3.0}, {0, 0, -1.0}, 10.0).has_value());
}

TEST_CASE("raycast requires a unit direction") {
  const auto map = box_scene_map();
  CHECK_THROWS_AS(map->raycast({0, 0, 2}, {0, 0, -2.0}, 5.0), std::invalid_argument);
}

TEST_CASE("raycast: 500 random rays against the analytic intersection oracle") {
  std::vector<Primitive> prims;
  const auto map = box_scene_map(&prims);
  sim::Rng rng(79);
  const double voxel = map->voxel_size();

  int hits = 0;
  double worst_surface = 0.0;
  double worst_depth = 0.0;
  for (int i = 0; i < 500; ++i) {
    // Cast from a shell around the scene toward a point near the boxes.
    const Eigen::Vector3d origin = Eigen::Vector3d(0.5, 0, 0) + 2.0 * rng.unit_vector();
    if (scene_signed_distance(prims, origin) <= 0.0) {
      continue;
    }
    const Eigen::Vector3d target(rng.uniform(-0.6, 2.0), rng.uniform(-0.8, 0.8),
                                 rng.uniform(-0.5, 0.7));
    const Eigen::Vector3d dir = (target - origin).normalized();

    const auto hit = map->raycast(origin, dir, 8.0);
    const auto oracle = scene_ray_intersect(prims, origin, dir);
    if (!hit) {
      continue;
    }
    REQUIRE(oracle.has_value());
    ++hits;
    const auto q = map->interpolate(hit->point);
    REQUIRE(q.has_value());
    worst_surface = std::max(worst_surface, std::abs(q->distance));

    // The depth comparison is only well-posed for solid hits: a ray that
    // grazes a box within half a voxel of its edge can legitimately miss
    // the voxelized surface and stop on the one behind. Require the
    // analytic ray to actually penetrate past the hit.
    double deepest = 1e9;
    for (int k = 1; k <= 8; ++k) {
      deepest =
          std::min(deepest, scene_signed_distance(prims, origin + (*oracle + k * 0.25 * voxel) * dir));
    }
    if (deepest <= -0.5 * voxel) {
      worst_depth = std::max(worst_depth, std::abs(hit->depth - *oracle));
    }
  }
  MESSAGE("hits ", hits, ", max |phi(hit)| ", worst_surface, ", max depth error ", worst_depth);
  CHECK(hits > 200);
  CHECK(worst_surface <= 0.1 * voxel);
  CHECK(worst_depth <= voxel);
}

TEST_CASE("raycast monotonicity: shrinking max_range never yields a farther hit") {
  std::vector<Primitive> prims;
  const auto map = box_scene_map(&prims);
  sim::Rng rng(83);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d origin = Eigen::Vector3d(0.5, 0, 0) + 2.0 * rng.unit_vector();
    const Eigen::Vector3d dir =
        (Eigen::Vector3d(rng.uniform(-0.5, 1.8), rng.uniform(-0.7, 0.7), rng.uniform(-0.4, 0.6)) -
         origin)
            .normalized();
    const auto full = map->raycast(origin, dir, 8.0);
    for (const double range : {6.0, 4.0, 2.0, 1.0}) {
      const auto shorter = map->raycast(origin, dir, range);
      if (shorter) {
        REQUIRE(full.has_value());
        CHECK(shorter->depth <= full->depth + 1e-12);
      }
    }
  }
}
