// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdfloc/geometry/se3.hpp"

namespace sdfloc::sim {

/// One camera pose along a trajectory. world_from_camera places the
/// camera in the world; its translation is the camera center.
struct TrajectoryFrame {
  double timestamp = 0.0;
  Pose world_from_camera;
};

struct Trajectory {
  std::vector<TrajectoryFrame> frames;

  size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }

  /// Timestamps strictly increasing and consecutive motion below the
  /// given bounds.
  bool valid(double max_translation_per_frame = 1.0,
             double max_rotation_per_frame = 1.0) const;
};

/// Circular orbit of radius `radius` at height `height` around `center`,
/// cameras looking at the center. Covers `revolutions` turns over
/// num_frames frames at the given rate.
Trajectory make_orbit_trajectory(const Eigen::Vector3d& center, double radius, double height,
                                 int num_frames, double fps, double revolutions = 1.0);

/// Plain-text trajectory files: one line per frame,
/// `timestamp tx ty tz qx qy qz qw` (world_from_camera, quaternion
/// w-last), '#' comments allowed. Writing is byte-deterministic.
Trajectory load_trajectory(const std::string& path);
void save_trajectory(const Trajectory& trajectory, const std::string& path);

}  // namespace sdfloc::sim
