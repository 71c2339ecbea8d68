// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include <Eigen/Core>

#include "sdfloc/geometry/se3.hpp"

namespace sdfloc {

/// Continuous image coordinates. u, v are always expressed at pyramid
/// level 0; level only selects the measurement variance (2^level pixels).
struct Pixel {
  double u = 0.0;
  double v = 0.0;
  int level = 0;

  Pixel() = default;
  Pixel(double u_in, double v_in, int level_in = 0) : u(u_in), v(v_in), level(level_in) {}

  Eigen::Vector2d uv() const { return {u, v}; }
};

/// Pinhole model without distortion.
class CameraIntrinsics {
 public:
  /// Throws ConfigError unless fx, fy > 0 and the principal point lies
  /// inside the image.
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }

  bool in_image(const Pixel& px, double margin = 0.0) const {
    return px.u >= margin && px.u < width_ - margin && px.v >= margin && px.v < height_ - margin;
  }

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

/// Points closer than this to the image plane count as behind the camera.
inline constexpr double kMinProjectionDepth = 1e-6;

/// Projects a camera-frame point. Empty when z <= kMinProjectionDepth
/// (behind-camera error).
std::optional<Pixel> project(const CameraIntrinsics& intrinsics, const Eigen::Vector3d& p_cam);

/// 2x3 derivative of project() with respect to the camera-frame point.
/// Empty on behind-camera input.
std::optional<Eigen::Matrix<double, 2, 3>> project_jacobian(const CameraIntrinsics& intrinsics,
                                                            const Eigen::Vector3d& p_cam);

/// Unit viewing ray in the camera frame through the given pixel.
Eigen::Vector3d unproject_ray(const CameraIntrinsics& intrinsics, const Pixel& px);

}  // namespace sdfloc
