// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdfloc/map/primitives.hpp"
#include "sdfloc/sim/trajectory.hpp"

namespace sdfloc::eval {

enum class Alignment { kNone, kRigid, kSimilarity };

Alignment alignment_from_string(const std::string& name);

struct FrameError {
  double timestamp = 0.0;
  double translation = 0.0;   // meters
  double rotation_deg = 0.0;  // degrees
};

struct AteResult {
  double translation_rmse = 0.0;
  double rotation_rmse_deg = 0.0;
  std::vector<FrameError> per_frame;
};

/// Absolute trajectory error of `estimated` against `ground_truth`,
/// associated by nearest timestamp within 10 ms. kNone compares in the
/// shared map frame (the metric-localization setting); kRigid/kSimilarity
/// first align the estimate with the closed-form point-set solution
/// (without/with scale). Throws AssociationFailureError with fewer than
/// two matches.
AteResult compute_ate(const sim::Trajectory& estimated, const sim::Trajectory& ground_truth,
                      Alignment alignment);

/// Root-mean-square of the landmark distances to the scene surface (exact
/// analytic distance to the primitive union).
double structure_rmse(const std::vector<Eigen::Vector3d>& landmarks,
                      const std::vector<Primitive>& scene);

/// Nearest-neighbour variant against a reference point set.
double structure_rmse_points(const std::vector<Eigen::Vector3d>& landmarks,
                             const std::vector<Eigen::Vector3d>& reference);

/// Ratio of summed inter-frame translation norms, estimated / truth, over
/// associated frame pairs: the recovered global scale.
double interframe_scale(const sim::Trajectory& estimated, const sim::Trajectory& ground_truth);

}  // namespace sdfloc::eval
