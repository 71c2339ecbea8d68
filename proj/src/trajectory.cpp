// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/sim/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include "sdfloc/errors.hpp"

namespace sdfloc::sim {

bool Trajectory::valid(double max_translation_per_frame, double max_rotation_per_frame) const {
  for (size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp <= frames[i - 1].timestamp) {
      return false;
    }
    const Pose delta = frames[i - 1].world_from_camera.inverse() * frames[i].world_from_camera;
    if (delta.translation().norm() > max_translation_per_frame ||
        rotation_angle(delta) > max_rotation_per_frame) {
      return false;
    }
  }
  return true;
}

Trajectory make_orbit_trajectory(const Eigen::Vector3d& center, double radius, double height,
                                 int num_frames, double fps, double revolutions) {
  Trajectory trajectory;
  trajectory.frames.reserve(num_frames);
  for (int i = 0; i < num_frames; ++i) {
    const double angle = 2.0 * M_PI * revolutions * i / num_frames;
    const Eigen::Vector3d position =
        center + Eigen::Vector3d(radius * std::cos(angle), radius * std::sin(angle), height);
    // Camera +z looks at the center, +x spans the horizontal image axis.
    const Eigen::Vector3d forward = (center - position).normalized();
    Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
    if (right.norm() < 1e-6) {
      right = Eigen::Vector3d::UnitX();
    }
    right.normalize();
    const Eigen::Vector3d down = forward.cross(right).normalized();
    Eigen::Matrix3d r_wc;
    r_wc.col(0) = right;
    r_wc.col(1) = down;
    r_wc.col(2) = forward;
    trajectory.frames.push_back(TrajectoryFrame{i / fps, Pose(r_wc, position)});
  }
  return trajectory;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open trajectory file: " + path);
  }
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    std::istringstream ls(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    if (!(ls >> ts)) {
      continue;
    }
    if (!(ls >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      throw IoError("trajectory line " + std::to_string(line_no) +
                    ": expected 'timestamp tx ty tz qx qy qz qw'");
    }
    Eigen::Quaterniond q(qw, qx, qy, qz);
    if (q.norm() < 1e-9) {
      throw IoError("trajectory line " + std::to_string(line_no) + ": zero quaternion");
    }
    q.normalize();
    trajectory.frames.push_back(
        TrajectoryFrame{ts, Pose(q.toRotationMatrix(), Eigen::Vector3d(tx, ty, tz))});
  }
  return trajectory;
}

void save_trajectory(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write trajectory file: " + path);
  }
  char buf[256];
  for (const TrajectoryFrame& frame : trajectory.frames) {
    Eigen::Quaterniond q(frame.world_from_camera.rotation());
    q.normalize();
    if (q.w() < 0) {
      q.coeffs() *= -1.0;  // canonical sign for byte-stable output
    }
    const Eigen::Vector3d& t = frame.world_from_camera.translation();
    std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", frame.timestamp,
                  t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace sdfloc::sim
