// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/pose_refinement.hpp"

#include <cmath>

#include "sdfloc/errors.hpp"
#include "sdfloc/factors/factors.hpp"
#include "sdfloc/factors/robust_loss.hpp"
#include "sdfloc/geometry/se3.hpp"
#include "sdfloc/optim/linear_system.hpp"

namespace sdfloc {
namespace {

// Energy over the masked point set. A masked point whose query is
// unobserved is charged the loss at the truncation distance (the field's
// worst case), so a pose step cannot win by pushing points off the map.
double sdf_energy(const SdfMap& map, const Pose& world_from_camera,
                  const std::vector<Eigen::Vector3d>& points, const std::vector<uint8_t>& mask,
                  double sqrt_w, const RobustLoss& loss) {
  double energy = 0.0;
  const double unobserved_penalty = loss.energy(sqrt_w * map.truncation_distance());
  for (size_t i = 0; i < points.size(); ++i) {
    if (!mask[i]) {
      continue;
    }
    const auto residual = sdf_residual(map, world_from_camera * points[i]);
    energy += residual ? loss.energy(std::abs(*residual) * sqrt_w) : unobserved_penalty;
  }
  return energy;
}

}  // namespace

PoseRefineResult refine_pose(const SdfMap& map, const Pose& world_from_camera_init,
                             const std::vector<Eigen::Vector3d>& points_camera,
                             const SolverConfig& config) {
  config.validate();
  const double w = 1.0 / (map.sigma_sdf() * map.sigma_sdf());
  const double sqrt_w = std::sqrt(w);
  const RobustLoss loss{config.huber_delta};

  Pose pose = world_from_camera_init;
  // Only points with observed queries at the initial pose take part (the
  // tracked features that actually carry a map constraint); the rest are
  // out of the map's reach and would only bias the alignment.
  std::vector<uint8_t> mask(points_camera.size(), 0);
  int observed = 0;
  for (size_t i = 0; i < points_camera.size(); ++i) {
    if (map.interpolate(pose * points_camera[i]).has_value()) {
      mask[i] = 1;
      ++observed;
    }
  }
  if (observed < config.min_pose_refine_points) {
    throw DegenerateProblemError("refine_pose: fewer than " +
                                 std::to_string(config.min_pose_refine_points) +
                                 " points with observed SDF queries");
  }
  double energy = sdf_energy(map, pose, points_camera, mask, sqrt_w, loss);

  SolveReport report;
  report.initial_energy = energy;
  report.initial_sdf_energy = energy;
  report.accepted_energies.push_back(energy);
  report.termination = TerminationReason::kMaxIterations;

  double beta = config.beta0;
  bool done = false;
  for (int iteration = 0; iteration < config.max_iterations && !done; ++iteration) {
    ++report.iterations;

    // IRLS-weighted normal equations over the points observed at the
    // current iterate; the twist is taken at zero.
    BlockSystem system(1, 0);
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
    for (size_t i = 0; i < points_camera.size(); ++i) {
      if (!mask[i]) {
        continue;
      }
      const auto jac = sdf_jacobians(map, pose, points_camera[i]);
      if (!jac) {
        continue;
      }
      const double scale = w * loss.weight(std::abs(jac->residual) * sqrt_w);
      h += scale * jac->pose.transpose() * jac->pose;
      b -= scale * jac->pose.transpose() * jac->residual;
    }
    system.add_pose_block(0, h, b);

    // Retry with increased damping until a step is accepted or no downhill
    // step can be found.
    while (true) {
      const BlockSystem::Step step = system.solve(beta);
      if (!step.valid) {
        if (beta >= config.beta_max) {
          report.termination = TerminationReason::kSingularSystem;
          done = true;
          break;
        }
        beta = std::min(beta * config.beta_up, config.beta_max);
        continue;
      }
      if (step.pose.norm() < config.step_tol) {
        report.termination = TerminationReason::kConverged;
        done = true;
        break;
      }
      const Pose trial = apply_twist(Twist::from_vector(step.pose), pose);
      const double trial_energy = sdf_energy(map, trial, points_camera, mask, sqrt_w, loss);
      if (trial_energy < energy) {
        const double decrease = energy - trial_energy;
        pose = trial;  // fold the accepted twist into T; the twist resets to zero
        energy = trial_energy;
        report.accepted_energies.push_back(energy);
        beta = std::max(beta * config.beta_down, config.beta_min);
        if (decrease < config.energy_tol * std::max(energy, 1e-30)) {
          report.termination = TerminationReason::kConverged;
          done = true;
        }
        break;
      }
      if (beta >= config.beta_max) {
        // Damping exhausted without a decrease: accept the iterate we have.
        report.termination = TerminationReason::kConverged;
        done = true;
        break;
      }
      beta = std::min(beta * config.beta_up, config.beta_max);
    }
  }

  report.final_energy = energy;
  report.final_sdf_energy = energy;
  return PoseRefineResult{pose, report};
}

}  // namespace sdfloc
