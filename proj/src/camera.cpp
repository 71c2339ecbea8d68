// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/geometry/camera.hpp"

#include "sdfloc/errors.hpp"

namespace sdfloc {

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                                   int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (fx <= 0.0 || fy <= 0.0) {
    throw ConfigError("camera: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0 || cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw ConfigError("camera: principal point must lie inside the image");
  }
}

std::optional<Pixel> project(const CameraIntrinsics& intrinsics, const Eigen::Vector3d& p_cam) {
  if (p_cam.z() <= kMinProjectionDepth) {
    return std::nullopt;
  }
  const double inv_z = 1.0 / p_cam.z();
  return Pixel(intrinsics.fx() * p_cam.x() * inv_z + intrinsics.cx(),
               intrinsics.fy() * p_cam.y() * inv_z + intrinsics.cy());
}

std::optional<Eigen::Matrix<double, 2, 3>> project_jacobian(const CameraIntrinsics& intrinsics,
                                                            const Eigen::Vector3d& p_cam) {
  if (p_cam.z() <= kMinProjectionDepth) {
    return std::nullopt;
  }
  const double inv_z = 1.0 / p_cam.z();
  const double inv_z_sq = inv_z * inv_z;
  Eigen::Matrix<double, 2, 3> j;
  // clang-format off
  j << intrinsics.fx() * inv_z, 0.0,                     -intrinsics.fx() * p_cam.x() * inv_z_sq,
       0.0,                     intrinsics.fy() * inv_z, -intrinsics.fy() * p_cam.y() * inv_z_sq;
  // clang-format on
  return j;
}

Eigen::Vector3d unproject_ray(const CameraIntrinsics& intrinsics, const Pixel& px) {
  Eigen::Vector3d ray((px.u - intrinsics.cx()) / intrinsics.fx(),
                      (px.v - intrinsics.cy()) / intrinsics.fy(), 1.0);
  return ray.normalized();
}

}  // namespace sdfloc
