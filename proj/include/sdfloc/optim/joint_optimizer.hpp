// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Joint optimization of global poses and local structure, following the
// two-step schedule: a first Levenberg-Marquardt round converges under
// robust losses regardless of outliers; a chi-squared classification then
// deactivates failing SDF factors (tolerant occlusion handling) and
// removes visual outliers; a second round re-converges, after which a
// final classification dismisses the remaining outliers.

#pragma once

#include <vector>

#include "sdfloc/factors/robust_loss.hpp"
#include "sdfloc/optim/problem.hpp"
#include "sdfloc/optim/report.hpp"
#include "sdfloc/optim/solver_config.hpp"

namespace sdfloc {

/// Robustified energy of the problem at its current state:
/// total = repro + lambda * sdf. Inactive factors, behind-camera
/// projections and unobserved SDF queries contribute nothing.
struct EnergyBreakdown {
  double total = 0.0;
  double repro = 0.0;
  double sdf = 0.0;  // robustified SDF sum before the lambda weighting
};

EnergyBreakdown problem_energy(const Problem& problem, const RobustLoss& loss);

/// Two-threshold chi-squared rule on whitened squared residuals:
///   - an active SDF factor with w * phi^2 > th_sdf (or an unobserved
///     query) is deactivated, and its landmark is amnestied for this pass;
///   - any other landmark with an active reprojection factor whose
///     w * ||e||^2 > th_repro, or which sits behind an observing camera,
///     is declared an outlier.
/// Mutates only the SDF activation flags; removal is the caller's call.
struct OutlierClassification {
  std::vector<LandmarkId> outliers;
  std::vector<LandmarkId> deactivated_sdf;
};

OutlierClassification classify_outliers(Problem& problem, const SolverConfig& config);

/// Runs the full two-round schedule over the configured window, updating
/// non-fixed poses and all landmark positions in place. Outlier landmarks
/// are removed from the problem together with their factors.
///
/// Gauge policy: explicitly fixed keyframes and keyframes outside the
/// window anchor the frame; in auto mode, when neither exists and there
/// are no active SDF factors, the oldest keyframe is marked fixed.
/// Throws GaugeUnfixedError when sdf_anchored is requested without any
/// anchor and DegenerateProblemError for windows of fewer than two
/// keyframes.
JointReport joint_optimize(Problem& problem, const SolverConfig& config);

}  // namespace sdfloc
