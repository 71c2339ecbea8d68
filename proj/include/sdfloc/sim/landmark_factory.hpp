// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Landmark generation in two steps: cast the optical ray into the map and
// take the zero crossing as the depth prior; when the cast fails, fall
// back to mid-point triangulation from the temporal matches. Triangulated
// landmarks join the map-constrained set when the map can observe them,
// the vision-only set otherwise.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sdfloc/geometry/camera.hpp"
#include "sdfloc/map/sdf_map.hpp"
#include "sdfloc/optim/problem.hpp"

namespace sdfloc::sim {

enum class LandmarkBirth {
  kRaycast,        // depth prior from the map zero crossing
  kTriangulated,   // mid-point triangulation over tracked views
  kDegenerate,     // not enough parallax / views; deferred
};

struct GeneratedLandmark {
  LandmarkBirth birth = LandmarkBirth::kDegenerate;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  LandmarkSet set = LandmarkSet::kVisionOnly;
  /// Depth standard deviation implied by a one-pixel variance at the
  /// ray-cast hit (diagnostic only; the SDF factor keeps weight w_sdf).
  double depth_sigma = 0.0;
};

/// A tracked pixel of the landmark in some keyframe, with that keyframe's
/// current pose estimate.
struct ViewOfLandmark {
  Pose camera_from_world;
  Pixel pixel;
};

/// Generates one landmark from pixel u in the keyframe with pose
/// camera_from_world. other_views holds the temporal matches of the same
/// feature (excluding or including this one; duplicates are harmless).
/// max_raycast_range bounds the zero-crossing search; min_parallax_deg
/// gates the triangulation fallback.
GeneratedLandmark generate_landmark(const SdfMap& map, const CameraIntrinsics& intrinsics,
                                    const Pose& camera_from_world, const Pixel& u,
                                    const std::vector<ViewOfLandmark>& other_views,
                                    double max_raycast_range, double min_parallax_deg);

/// Least-squares mid-point of the viewing rays (for two views, the classic
/// two-ray mid-point). Empty when rays are closer to parallel than
/// min_parallax_deg or fewer than two views are given.
std::optional<Eigen::Vector3d> triangulate_midpoint(const CameraIntrinsics& intrinsics,
                                                    const std::vector<ViewOfLandmark>& views,
                                                    double min_parallax_deg);

}  // namespace sdfloc::sim
