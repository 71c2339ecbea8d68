// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/factors/factors.hpp"

namespace sdfloc {

std::optional<double> sdf_residual(const SdfMap& map, const Eigen::Vector3d& p_world) {
  const std::optional<SdfQuery> q = map.interpolate(p_world);
  if (!q) {
    return std::nullopt;
  }
  return q->distance;
}

std::optional<SdfJacobians> sdf_jacobians(const SdfMap& map, const Pose& world_from_local,
                                          const Eigen::Vector3d& p_local) {
  const Eigen::Vector3d p_world = world_from_local * p_local;
  const std::optional<SdfQuery> q = map.interpolate(p_world);
  if (!q) {
    return std::nullopt;
  }
  SdfJacobians j;
  j.residual = q->distance;
  j.point = q->gradient.transpose();
  j.pose = j.point * pose_point_jacobian(world_from_local, p_local);
  return j;
}

std::optional<SdfPointJacobian> sdf_point_jacobian(const SdfMap& map,
                                                   const Eigen::Vector3d& p_world) {
  const std::optional<SdfQuery> q = map.interpolate(p_world);
  if (!q) {
    return std::nullopt;
  }
  return SdfPointJacobian{q->distance, q->gradient.transpose()};
}

std::optional<Eigen::Vector2d> reprojection_residual(const CameraIntrinsics& intrinsics,
                                                     const Pose& camera_from_world,
                                                     const Eigen::Vector3d& p_world,
                                                     const Pixel& measured) {
  const std::optional<Pixel> projected = project(intrinsics, camera_from_world * p_world);
  if (!projected) {
    return std::nullopt;
  }
  return measured.uv() - projected->uv();
}

std::optional<ReprojectionJacobians> reprojection_jacobians(const CameraIntrinsics& intrinsics,
                                                            const Pose& camera_from_world,
                                                            const Eigen::Vector3d& p_world,
                                                            const Pixel& measured) {
  const Eigen::Vector3d p_cam = camera_from_world * p_world;
  const std::optional<Pixel> projected = project(intrinsics, p_cam);
  const auto j_proj = project_jacobian(intrinsics, p_cam);
  if (!projected || !j_proj) {
    return std::nullopt;
  }
  ReprojectionJacobians j;
  j.residual = measured.uv() - projected->uv();
  j.point = -(*j_proj) * camera_from_world.rotation();
  // Left-multiplicative twist on T_cw moves the camera-frame point by
  // [I | -p_cam^].
  Eigen::Matrix<double, 3, 6> d_pcam;
  d_pcam.leftCols<3>() = Eigen::Matrix3d::Identity();
  d_pcam.rightCols<3>() = -skew(p_cam);
  j.pose = -(*j_proj) * d_pcam;
  return j;
}

}  // namespace sdfloc
