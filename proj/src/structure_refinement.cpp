// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/structure_refinement.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sdfloc/factors/robust_loss.hpp"
#include "sdfloc/optim/linear_system.hpp"

namespace sdfloc {
namespace {

struct LandmarkContext {
  const Problem& problem;
  LandmarkId id;
  std::vector<size_t> observations;
  bool use_sdf = false;
  double sdf_weight = 0.0;
  RobustLoss loss;
};

// Per-evaluation bookkeeping for fair trial comparisons: factors may not
// lower the energy by leaving their domain. Reprojection factors visible
// at the current state make a trial inadmissible when they fall behind
// the camera; an unobserved SDF query is charged the loss at the
// truncation distance, the field's worst case.
struct LandmarkEvalContext {
  std::vector<uint8_t> visible;
};

// Robustified energy of one landmark's factors at a candidate position.
// unobserved_sdf reports whether the SDF query failed there.
double landmark_energy(const LandmarkContext& ctx, const Eigen::Vector3d& position,
                       bool* unobserved_sdf = nullptr,
                       const LandmarkEvalContext* current = nullptr,
                       LandmarkEvalContext* context_out = nullptr) {
  double energy = 0.0;
  if (unobserved_sdf != nullptr) {
    *unobserved_sdf = false;
  }
  if (context_out != nullptr) {
    context_out->visible.assign(ctx.observations.size(), 0);
  }
  for (size_t i = 0; i < ctx.observations.size(); ++i) {
    const ReprojectionFactor& f = ctx.problem.reprojection_factors()[ctx.observations[i]];
    if (!f.active) {
      continue;
    }
    const Keyframe& kf = ctx.problem.keyframes().at(f.keyframe);
    const auto residual = reprojection_residual(ctx.problem.intrinsics(), kf.camera_from_world,
                                                position, f.measured);
    if (!residual) {
      if (current != nullptr && current->visible[i]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;  // was already behind: silent for this evaluation
    }
    if (context_out != nullptr) {
      context_out->visible[i] = 1;
    }
    energy += ctx.loss.energy(std::sqrt(f.weight) * residual->norm());
  }
  if (ctx.use_sdf) {
    const auto residual = sdf_residual(*ctx.problem.map(), position);
    if (!residual) {
      if (unobserved_sdf != nullptr) {
        *unobserved_sdf = true;
      }
      energy += ctx.problem.coupling_lambda() *
                ctx.loss.energy(std::sqrt(ctx.sdf_weight) *
                                ctx.problem.map()->truncation_distance());
    } else {
      energy += ctx.problem.coupling_lambda() *
                ctx.loss.energy(std::sqrt(ctx.sdf_weight) * std::abs(*residual));
    }
  }
  return energy;
}

// One landmark's damped normal equations at its current position.
void build_system(const LandmarkContext& ctx, const Eigen::Vector3d& position,
                  Eigen::Matrix3d& h, Eigen::Vector3d& b) {
  h.setZero();
  b.setZero();
  for (const size_t idx : ctx.observations) {
    const ReprojectionFactor& f = ctx.problem.reprojection_factors()[idx];
    if (!f.active) {
      continue;
    }
    const Keyframe& kf = ctx.problem.keyframes().at(f.keyframe);
    const auto jac = reprojection_jacobians(ctx.problem.intrinsics(), kf.camera_from_world,
                                            position, f.measured);
    if (!jac) {
      continue;
    }
    const double scale = f.weight * ctx.loss.weight(std::sqrt(f.weight) * jac->residual.norm());
    h += scale * jac->point.transpose() * jac->point;
    b -= scale * jac->point.transpose() * jac->residual;
  }
  if (ctx.use_sdf) {
    const auto jac = sdf_point_jacobian(*ctx.problem.map(), position);
    if (jac) {
      const double scale = ctx.problem.coupling_lambda() * ctx.sdf_weight *
                           ctx.loss.weight(std::sqrt(ctx.sdf_weight) * std::abs(jac->residual));
      h += scale * jac->point.transpose() * jac->point;
      b -= scale * jac->point.transpose() * jac->residual;
    }
  }
}

}  // namespace

StructureReport refine_structure(Problem& problem, const SolverConfig& config) {
  config.validate();
  StructureReport report;
  const RobustLoss loss{config.huber_delta};

  std::vector<LandmarkId> ids;
  ids.reserve(problem.landmarks().size());
  for (const auto& [id, landmark] : problem.landmarks()) {
    ids.push_back(id);
  }

  for (const LandmarkId id : ids) {
    Landmark& landmark = problem.landmarks().at(id);

    LandmarkContext ctx{problem, id, problem.observations_of(id), false, 0.0, loss};
    int active_obs = 0;
    for (const size_t idx : ctx.observations) {
      active_obs += problem.reprojection_factors()[idx].active ? 1 : 0;
    }
    const auto sdf_it = problem.sdf_factors().find(id);
    bool sdf_contributes = false;
    if (sdf_it != problem.sdf_factors().end() && sdf_it->second.active &&
        problem.coupling_lambda() > 0.0 && problem.map() != nullptr) {
      sdf_contributes = sdf_residual(*problem.map(), landmark.position).has_value();
      ctx.use_sdf = sdf_contributes;
      ctx.sdf_weight = sdf_it->second.weight;
    }
    if (active_obs < 2 && !(active_obs >= 1 && sdf_contributes)) {
      ++report.landmarks_skipped_underconstrained;
      continue;
    }

    bool unobserved = false;
    LandmarkEvalContext context;
    double energy = landmark_energy(ctx, landmark.position, &unobserved, nullptr, &context);
    report.initial_energy += energy;
    double beta = config.beta0;
    bool done = false;
    for (int iteration = 0; iteration < config.max_iterations && !done; ++iteration) {
      if (unobserved && ctx.use_sdf) {
        // Query fell off the observed map: permanent migration M -> N.
        problem.migrate_to_vision_only(id);
        ++report.migrated_to_vision_only;
        ctx.use_sdf = false;
        energy = landmark_energy(ctx, landmark.position, &unobserved, nullptr, &context);
        if (active_obs < 2) {
          break;  // no longer constrained without the SDF factor
        }
      }
      Eigen::Matrix3d h;
      Eigen::Vector3d b;
      build_system(ctx, landmark.position, h, b);
      BlockSystem system(0, 1);
      system.add_landmark_block(0, h, b);

      while (true) {
        const BlockSystem::Step step = system.solve(beta);
        if (!step.valid) {
          if (beta >= config.beta_max) {
            done = true;
            break;
          }
          beta = std::min(beta * config.beta_up, config.beta_max);
          continue;
        }
        if (step.landmark.norm() < config.step_tol) {
          done = true;
          break;
        }
        const Eigen::Vector3d trial = landmark.position + step.landmark;
        const double trial_energy = landmark_energy(ctx, trial, nullptr, &context);
        if (trial_energy < energy) {
          const double decrease = energy - trial_energy;
          landmark.position = trial;
          // Re-evaluate as the new current state; an unobserved SDF query
          // here triggers the migration branch at the next iteration.
          energy = landmark_energy(ctx, landmark.position, &unobserved, nullptr, &context);
          beta = std::max(beta * config.beta_down, config.beta_min);
          if (decrease < config.energy_tol * std::max(energy, 1e-30)) {
            done = true;
          }
          break;
        }
        if (beta >= config.beta_max) {
          done = true;
          break;
        }
        beta = std::min(beta * config.beta_up, config.beta_max);
      }
    }
    if (unobserved && ctx.use_sdf) {
      // Converged onto unobserved ground: the migration still applies.
      problem.migrate_to_vision_only(id);
      ++report.migrated_to_vision_only;
      ctx.use_sdf = false;
      energy = landmark_energy(ctx, landmark.position);
    }
    report.final_energy += energy;
    ++report.landmarks_refined;
  }
  return report;
}

}  // namespace sdfloc
