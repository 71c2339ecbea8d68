// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Analytic scene primitives: exact signed distances, gradients and ray
// intersections for spheres, axis-aligned boxes and planes. The map
// builder samples these; the simulator uses them as occlusion and
// ground-truth oracles.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace sdfloc {

struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

/// Axis-aligned box given by center and full edge lengths.
struct Box {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};

/// Half-space boundary n . p = d with unit normal; positive side is outside.
struct Plane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
};

using Primitive = std::variant<Sphere, Box, Plane>;

double signed_distance(const Primitive& primitive, const Eigen::Vector3d& p);

/// Gradient of the signed distance; unit length away from medial surfaces.
Eigen::Vector3d signed_distance_gradient(const Primitive& primitive, const Eigen::Vector3d& p);

/// First intersection parameter t >= 0 of origin + t * direction with the
/// primitive surface, or empty on a miss. direction must be unit length.
std::optional<double> ray_intersect(const Primitive& primitive, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction);

/// Union of primitives, as the scene SDF: min over members.
double scene_signed_distance(const std::vector<Primitive>& primitives, const Eigen::Vector3d& p);

Eigen::Vector3d scene_signed_distance_gradient(const std::vector<Primitive>& primitives,
                                               const Eigen::Vector3d& p);

/// Nearest surface hit over the whole primitive list.
std::optional<double> scene_ray_intersect(const std::vector<Primitive>& primitives,
                                          const Eigen::Vector3d& origin,
                                          const Eigen::Vector3d& direction);

/// Parses the plain-text scene format: one primitive per line,
///   sphere cx cy cz r
///   box cx cy cz sx sy sz
///   plane nx ny nz d
/// with '#' comments and blank lines allowed. Units are meters; plane
/// normals are normalized on load. Throws IoError on malformed input.
std::vector<Primitive> load_scene_file(const std::string& path);

std::vector<Primitive> parse_scene_text(const std::string& text);

void save_scene_file(const std::string& path, const std::vector<Primitive>& primitives);

}  // namespace sdfloc
