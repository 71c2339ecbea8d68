// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/sim/landmark_factory.hpp"

#include <cmath>

namespace sdfloc::sim {
namespace {

// Depth change caused by a one-pixel shift of the measurement, evaluated
// by intersecting the perturbed rays with the tangent plane at the hit.
double raycast_depth_sigma(const SdfMap& map, const CameraIntrinsics& intrinsics,
                           const Pose& world_from_camera, const Pixel& u, const RayHit& hit) {
  const auto query = map.interpolate(hit.point);
  if (!query || query->gradient.norm() < 1e-9) {
    return 0.0;
  }
  const Eigen::Vector3d normal = query->gradient.normalized();
  const Eigen::Vector3d origin = world_from_camera.translation();
  const double plane_offset = normal.dot(hit.point - origin);
  double worst = 0.0;
  for (const Pixel& perturbed : {Pixel(u.u + 1.0, u.v, u.level), Pixel(u.u, u.v + 1.0, u.level)}) {
    const Eigen::Vector3d dir =
        world_from_camera.rotation() * unproject_ray(intrinsics, perturbed);
    const double denom = normal.dot(dir);
    if (std::abs(denom) < 1e-9) {
      continue;
    }
    worst = std::max(worst, std::abs(plane_offset / denom - hit.depth));
  }
  return worst;
}

}  // namespace

std::optional<Eigen::Vector3d> triangulate_midpoint(const CameraIntrinsics& intrinsics,
                                                    const std::vector<ViewOfLandmark>& views,
                                                    double min_parallax_deg) {
  if (views.size() < 2) {
    return std::nullopt;
  }
  std::vector<Eigen::Vector3d> origins, directions;
  origins.reserve(views.size());
  directions.reserve(views.size());
  for (const ViewOfLandmark& view : views) {
    const Pose world_from_camera = view.camera_from_world.inverse();
    origins.push_back(world_from_camera.translation());
    directions.push_back(world_from_camera.rotation() * unproject_ray(intrinsics, view.pixel));
  }

  double max_parallax = 0.0;
  for (size_t i = 0; i < directions.size(); ++i) {
    for (size_t j = i + 1; j < directions.size(); ++j) {
      const double c = std::clamp(directions[i].dot(directions[j]), -1.0, 1.0);
      max_parallax = std::max(max_parallax, std::acos(c));
    }
  }
  if (max_parallax < min_parallax_deg * M_PI / 180.0) {
    return std::nullopt;
  }

  // p minimizing sum of squared distances to the rays:
  // sum (I - d d^T) (p - o) = 0.
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < origins.size(); ++i) {
    const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - directions[i] * directions[i].transpose();
    a += m;
    b += m * origins[i];
  }
  const Eigen::Vector3d p = a.ldlt().solve(b);
  if (!p.allFinite()) {
    return std::nullopt;
  }
  // Behind-camera solutions are degenerate, not landmarks.
  for (size_t i = 0; i < origins.size(); ++i) {
    if (directions[i].dot(p - origins[i]) <= 0.0) {
      return std::nullopt;
    }
  }
  return p;
}

GeneratedLandmark generate_landmark(const SdfMap& map, const CameraIntrinsics& intrinsics,
                                    const Pose& camera_from_world, const Pixel& u,
                                    const std::vector<ViewOfLandmark>& other_views,
                                    double max_raycast_range, double min_parallax_deg) {
  GeneratedLandmark out;
  const Pose world_from_camera = camera_from_world.inverse();
  const Eigen::Vector3d direction = world_from_camera.rotation() * unproject_ray(intrinsics, u);

  const auto hit = map.raycast(world_from_camera.translation(), direction, max_raycast_range);
  if (hit) {
    out.birth = LandmarkBirth::kRaycast;
    out.position = hit->point;
    out.set = LandmarkSet::kMapConstrained;
    out.depth_sigma = raycast_depth_sigma(map, intrinsics, world_from_camera, u, *hit);
    return out;
  }

  std::vector<ViewOfLandmark> views = other_views;
  views.push_back(ViewOfLandmark{camera_from_world, u});
  const auto triangulated = triangulate_midpoint(intrinsics, views, min_parallax_deg);
  if (!triangulated) {
    out.birth = LandmarkBirth::kDegenerate;
    return out;
  }
  out.birth = LandmarkBirth::kTriangulated;
  out.position = *triangulated;
  out.set = map.interpolate(out.position).has_value() ? LandmarkSet::kMapConstrained
                                                      : LandmarkSet::kVisionOnly;
  return out;
}

}  // namespace sdfloc::sim
