// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/sim/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "sdfloc/errors.hpp"
#include "sdfloc/sim/random.hpp"

namespace sdfloc::sim {
namespace {

Eigen::Vector3d sample_on_sphere(const Sphere& s, Rng& rng) {
  return s.center + s.radius * rng.unit_vector();
}

Eigen::Vector3d sample_on_box(const Box& b, Rng& rng) {
  const Eigen::Vector3d h = 0.5 * b.size;
  // Face selection proportional to face area.
  const double ax = b.size.y() * b.size.z();
  const double ay = b.size.x() * b.size.z();
  const double az = b.size.x() * b.size.y();
  const double pick = rng.uniform() * (ax + ay + az);
  const int axis = pick < ax ? 0 : (pick < ax + ay ? 1 : 2);
  const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
  Eigen::Vector3d p = b.center;
  p[axis] += side * h[axis];
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  p[u] += rng.uniform(-h[u], h[u]);
  p[v] += rng.uniform(-h[v], h[v]);
  return p;
}

Eigen::Vector3d sample_on_plane(const Plane& pl, const MapBounds& bounds, Rng& rng) {
  const Eigen::Vector3d q(rng.uniform(bounds.min.x(), bounds.max.x()),
                          rng.uniform(bounds.min.y(), bounds.max.y()),
                          rng.uniform(bounds.min.z(), bounds.max.z()));
  return q - (pl.normal.dot(q) - pl.offset) * pl.normal;
}

bool inside_bounds(const Eigen::Vector3d& p, const MapBounds& bounds) {
  return (p.array() >= bounds.min.array()).all() && (p.array() <= bounds.max.array()).all();
}

}  // namespace

SyntheticScene make_scene(const std::vector<Primitive>& primitives, const MapBounds& bounds,
                          int num_anchors, uint64_t seed) {
  if (primitives.empty()) {
    throw EmptySceneError("make_scene: primitive list is empty");
  }
  SyntheticScene scene;
  scene.primitives = primitives;
  scene.seed = seed;
  Rng rng(mix_seed(seed, 0x5ce9eul));

  const long max_attempts = 20000L * std::max(num_anchors, 1);
  long attempts = 0;
  while (static_cast<int>(scene.anchors.size()) < num_anchors) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("make_scene: anchor sampling failed; primitives buried or "
                               "outside bounds");
    }
    const auto& prim = primitives[rng.uniform_int(0, static_cast<int>(primitives.size()) - 1)];
    const Eigen::Vector3d p = std::visit(
        [&](const auto& typed) -> Eigen::Vector3d {
          using T = std::decay_t<decltype(typed)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            return sample_on_sphere(typed, rng);
          } else if constexpr (std::is_same_v<T, Box>) {
            return sample_on_box(typed, rng);
          } else {
            return sample_on_plane(typed, bounds, rng);
          }
        },
        prim);
    if (!inside_bounds(p, bounds)) {
      continue;
    }
    // Reject anchors buried inside another primitive.
    if (std::abs(scene.sdf(p)) > 1e-9) {
      continue;
    }
    scene.anchors.push_back(p);
  }
  return scene;
}

std::vector<Primitive> room_primitives() {
  std::vector<Primitive> prims;
  prims.emplace_back(Plane{Eigen::Vector3d::UnitZ(), 0.0});    // floor z = 0
  prims.emplace_back(Plane{Eigen::Vector3d::UnitX(), -3.0});   // wall x = -3
  prims.emplace_back(Plane{Eigen::Vector3d::UnitY(), -3.0});   // wall y = -3
  prims.emplace_back(Box{{1.2, -1.0, 0.5}, {1.0, 0.8, 1.0}});
  prims.emplace_back(Box{{-1.5, 1.2, 0.4}, {0.8, 1.2, 0.8}});
  prims.emplace_back(Sphere{{0.0, -0.5, 0.4}, 0.4});
  return prims;
}

MapBounds room_bounds(double voxel_size) {
  const double margin = 2.0 * voxel_size;
  MapBounds bounds;
  bounds.min = Eigen::Vector3d(-3.2 - margin, -3.2 - margin, -0.2 - margin);
  bounds.max = Eigen::Vector3d(2.6 + margin, 2.6 + margin, 2.8 + margin);
  return bounds;
}

}  // namespace sdfloc::sim
