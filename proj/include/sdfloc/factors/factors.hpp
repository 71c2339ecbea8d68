// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The two residual types of the localization problem.
//
// SDF factor: residual phi(p) of a landmark against the prior map, with
// information weight w_sdf = 1 / sigma_sdf^2. During pose refinement the
// same residual is parametrized through the pose chain (xi (+) T) p;
// during structure refinement directly through p. Both Jacobian forms are
// provided.
//
// Reprojection factor: residual u_meas - pi(T_cw p) in pixels, with
// weight 1 / sigma_level^2 where sigma_level = 2^level.

#pragma once

#include <optional>

#include <Eigen/Core>

#include "sdfloc/geometry/camera.hpp"
#include "sdfloc/geometry/se3.hpp"
#include "sdfloc/map/sdf_map.hpp"

namespace sdfloc {

/// sigma in level-0 pixels of a measurement at the given pyramid level.
inline double pixel_sigma(int level) { return static_cast<double>(1 << level); }

/// 1 / sigma^2 for a reprojection measurement at the given pyramid level.
inline double reprojection_weight(int level) {
  const double s = pixel_sigma(level);
  return 1.0 / (s * s);
}

/// Map distance at a world point; empty when the query is unobserved
/// (caller migrates the landmark to the vision-only set or deactivates
/// the factor).
std::optional<double> sdf_residual(const SdfMap& map, const Eigen::Vector3d& p_world);

struct SdfJacobians {
  double residual = 0.0;
  Eigen::RowVector3d point;               // d phi / d p
  Eigen::Matrix<double, 1, 6> pose;       // d phi((xi (+) T) p_local) / d xi at 0
};

/// Jacobians of the SDF residual. world_from_local and p_local describe
/// the pose-refinement chain: the evaluated world point is
/// world_from_local * p_local, and the pose block differentiates a
/// left-multiplicative twist on world_from_local.
std::optional<SdfJacobians> sdf_jacobians(const SdfMap& map, const Pose& world_from_local,
                                          const Eigen::Vector3d& p_local);

/// Point-only form used for structure refinement (residual and d phi / d p
/// at a world point).
struct SdfPointJacobian {
  double residual = 0.0;
  Eigen::RowVector3d point;
};

std::optional<SdfPointJacobian> sdf_point_jacobian(const SdfMap& map,
                                                   const Eigen::Vector3d& p_world);

/// u_meas - pi(T_cw p_world); empty when the point is behind the camera
/// (the factor is deactivated for that evaluation).
std::optional<Eigen::Vector2d> reprojection_residual(const CameraIntrinsics& intrinsics,
                                                     const Pose& camera_from_world,
                                                     const Eigen::Vector3d& p_world,
                                                     const Pixel& measured);

struct ReprojectionJacobians {
  Eigen::Vector2d residual;
  Eigen::Matrix<double, 2, 3> point;  // d e / d p_world
  Eigen::Matrix<double, 2, 6> pose;   // d e / d xi for T_cw <- exp(xi) T_cw
};

std::optional<ReprojectionJacobians> reprojection_jacobians(const CameraIntrinsics& intrinsics,
                                                            const Pose& camera_from_world,
                                                            const Eigen::Vector3d& p_world,
                                                            const Pixel& measured);

}  // namespace sdfloc
