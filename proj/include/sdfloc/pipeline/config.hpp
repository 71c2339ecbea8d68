// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "sdfloc/geometry/camera.hpp"
#include "sdfloc/optim/solver_config.hpp"

namespace sdfloc::pipeline {

/// Full run configuration: input paths, camera, simulated front-end,
/// odometry corruption, solver settings and output location. Loadable
/// from one key=value file (solver keys included); unknown keys are
/// rejected. Path existence is checked at load.
struct PipelineConfig {
  // Inputs and outputs.
  std::string map_file;
  std::string scene_file;
  std::string trajectory_file;
  std::string output_dir;

  // Camera (shared by simulation and estimation).
  double fx = 320.0, fy = 320.0, cx = 320.0, cy = 240.0;
  int width = 640, height = 480;

  // Keyframing and the simulated front-end.
  int keyframe_stride = 4;
  int num_anchors = 200;
  double sigma_px = 0.5;
  int max_level = 0;
  double structure_sigma = 0.01;   // camera-frame correspondence noise (m)
  double max_raycast_range = 12.0;
  int joint_every = 1;             // run joint optimization every n-th keyframe

  // Odometry corruption.
  double sigma_odom_t = 0.0;       // m per frame
  double sigma_odom_r_deg = 0.0;   // deg per frame
  double odom_scale = 1.0;

  // Initial-guess perturbation (applied to the first keyframe pose).
  double init_perturb_tx = 0.0, init_perturb_ty = 0.0, init_perturb_tz = 0.0;  // m
  double init_perturb_rx_deg = 0.0, init_perturb_ry_deg = 0.0, init_perturb_rz_deg = 0.0;

  uint64_t seed = 1;

  SolverConfig solver;

  CameraIntrinsics intrinsics() const {
    return CameraIntrinsics(fx, fy, cx, cy, width, height);
  }

  /// Throws ConfigError on out-of-range values or missing input files.
  void validate() const;

  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_text(const std::string& text, const std::string& base_dir = "");
};

}  // namespace sdfloc::pipeline
