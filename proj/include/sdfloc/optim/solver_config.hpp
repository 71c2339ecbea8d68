// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace sdfloc {

enum class GaugeMode {
  kAuto,         // fix the oldest keyframe unless SDF factors anchor the frame
  kFixedFirst,   // always fix the oldest keyframe in the window
  kSdfAnchored,  // no fixed keyframe; SDF factors provide the global anchor
};

/// Levenberg-Marquardt and outlier-test parameters.
///
/// Loadable from a plain-text key=value file. Recognized keys:
///   lambda, beta0, beta_up, beta_down, beta_min, beta_max,
///   max_iterations, energy_tol, step_tol, th_sdf, th_repro, huber_delta,
///   min_pose_refine_points, min_parallax_deg, window, gauge.
/// Unknown keys are ignored so that solver and pipeline settings can share
/// one file.
struct SolverConfig {
  int max_iterations = 20;     // per LM round
  double beta0 = 1e-4;         // initial damping (H + beta I)
  double beta_up = 10.0;       // on rejected step
  double beta_down = 0.5;      // on accepted step
  double beta_min = 1e-12;
  double beta_max = 1e6;
  double energy_tol = 1e-8;    // relative energy decrease
  double step_tol = 1e-10;     // step norm
  double th_sdf = 3.841;       // chi^2, 1 dof, 95%
  double th_repro = 5.991;     // chi^2, 2 dof, 95%
  double huber_delta = 1.345;
  double lambda = 1.0;         // coupling factor on the SDF energy
  int min_pose_refine_points = 6;
  double min_parallax_deg = 1.0;
  int window = 0;              // joint-optimization window; 0 = all keyframes
  GaugeMode gauge = GaugeMode::kAuto;

  /// Throws ConfigError when any parameter is out of range.
  void validate() const;

  static SolverConfig from_file(const std::string& path);
  static SolverConfig from_text(const std::string& text);
};

}  // namespace sdfloc
