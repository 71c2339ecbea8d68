// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Core>

#include "sdfloc/geometry/se3.hpp"
#include "sdfloc/map/sdf_map.hpp"
#include "sdfloc/optim/report.hpp"
#include "sdfloc/optim/solver_config.hpp"

namespace sdfloc {

struct PoseRefineResult {
  Pose world_from_camera;
  SolveReport report;
};

/// Aligns a rigid set of camera-frame points to the map by minimizing the
/// robustified SDF energy sum_i || phi(exp(xi) * T * p_i) || over the
/// 6-DoF twist. The twist is folded into T after every accepted step and
/// reset to zero. Points whose query is unobserved at the current iterate
/// contribute nothing to that iteration.
///
/// world_from_camera_init is the odometry pose estimate; points_camera are
/// the tracked map-constrained features expressed in its camera frame.
/// Throws DegenerateProblemError when fewer than
/// config.min_pose_refine_points points have observed queries at the
/// initial pose.
PoseRefineResult refine_pose(const SdfMap& map, const Pose& world_from_camera_init,
                             const std::vector<Eigen::Vector3d>& points_camera,
                             const SolverConfig& config);

}  // namespace sdfloc
