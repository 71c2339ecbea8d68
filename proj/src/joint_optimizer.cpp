// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/joint_optimizer.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "sdfloc/errors.hpp"
#include "sdfloc/optim/linear_system.hpp"

namespace sdfloc {
namespace {

struct Indexing {
  std::vector<KeyframeId> free_keyframes;   // block index -> id
  std::map<KeyframeId, int> keyframe_block; // id -> block index (free only)
  std::vector<LandmarkId> landmarks;        // block index -> id
  std::map<LandmarkId, int> landmark_block;
};

struct State {
  std::vector<Pose> keyframe_pose;            // for free keyframes
  std::vector<Eigen::Vector3d> landmark_pos;  // for all indexed landmarks
};

Indexing build_indexing(const Problem& problem, int window) {
  Indexing idx;
  // The optimization window covers the newest `window` keyframes; zero
  // means all. Keyframes outside the window are held fixed for the solve.
  std::vector<KeyframeId> in_window;
  {
    std::vector<KeyframeId> all;
    for (const auto& [id, kf] : problem.keyframes()) {
      all.push_back(id);
    }
    const size_t skip =
        (window > 0 && all.size() > static_cast<size_t>(window)) ? all.size() - window : 0;
    in_window.assign(all.begin() + skip, all.end());
  }
  for (const KeyframeId id : in_window) {
    if (!problem.keyframes().at(id).fixed) {
      idx.keyframe_block[id] = static_cast<int>(idx.free_keyframes.size());
      idx.free_keyframes.push_back(id);
    }
  }
  for (const auto& [id, landmark] : problem.landmarks()) {
    idx.landmark_block[id] = static_cast<int>(idx.landmarks.size());
    idx.landmarks.push_back(id);
  }
  return idx;
}

State snapshot_state(const Problem& problem, const Indexing& idx) {
  State state;
  state.keyframe_pose.reserve(idx.free_keyframes.size());
  for (const KeyframeId id : idx.free_keyframes) {
    state.keyframe_pose.push_back(problem.keyframes().at(id).camera_from_world);
  }
  state.landmark_pos.reserve(idx.landmarks.size());
  for (const LandmarkId id : idx.landmarks) {
    state.landmark_pos.push_back(problem.landmarks().at(id).position);
  }
  return state;
}

void write_back(Problem& problem, const Indexing& idx, const State& state) {
  for (size_t i = 0; i < idx.free_keyframes.size(); ++i) {
    problem.keyframes().at(idx.free_keyframes[i]).camera_from_world = state.keyframe_pose[i];
  }
  for (size_t i = 0; i < idx.landmarks.size(); ++i) {
    problem.landmarks().at(idx.landmarks[i]).position = state.landmark_pos[i];
  }
}

const Pose& pose_of(const Problem& problem, const Indexing& idx, const State& state,
                    KeyframeId id) {
  const auto it = idx.keyframe_block.find(id);
  if (it != idx.keyframe_block.end()) {
    return state.keyframe_pose[it->second];
  }
  return problem.keyframes().at(id).camera_from_world;
}

// Per-evaluation bookkeeping that makes trial comparisons fair: a factor
// may not lower the energy by leaving its domain. Reprojection factors
// visible at the current state make a trial inadmissible when they fall
// behind the camera. Active SDF factors with an unobserved query are
// charged the worst case, the loss at the truncation distance (observed
// queries are clamped there, so this is the field's continuous
// extension); leaving the map is never cheaper than staying on it.
struct EvalContext {
  std::vector<uint8_t> repro_visible;  // by reprojection factor index
};

double sdf_unobserved_penalty(const Problem& problem, const RobustLoss& loss) {
  const SdfMap* map = problem.map();
  if (map == nullptr) {
    return 0.0;
  }
  const double w = 1.0 / (map->sigma_sdf() * map->sigma_sdf());
  return problem.coupling_lambda() * loss.energy(std::sqrt(w) * map->truncation_distance());
}

/// Robustified energy at an arbitrary state. With `current` set this is a
/// trial evaluation judged against it; with `context_out` set, the
/// current-state context is recorded and landmarks whose active SDF query
/// is unobserved are reported (candidates for M -> N migration).
double evaluate_energy(const Problem& problem, const Indexing& idx, const State& state,
                       const RobustLoss& loss, std::vector<LandmarkId>* unobserved = nullptr,
                       const EvalContext* current = nullptr,
                       EvalContext* context_out = nullptr) {
  double energy = 0.0;
  const auto& factors = problem.reprojection_factors();
  if (context_out != nullptr) {
    context_out->repro_visible.assign(factors.size(), 0);
  }
  for (size_t i = 0; i < factors.size(); ++i) {
    const ReprojectionFactor& f = factors[i];
    if (!f.active) {
      continue;
    }
    const Pose& pose = pose_of(problem, idx, state, f.keyframe);
    const Eigen::Vector3d& p = state.landmark_pos[idx.landmark_block.at(f.landmark)];
    const auto residual = reprojection_residual(problem.intrinsics(), pose, p, f.measured);
    if (!residual) {
      if (current != nullptr && current->repro_visible[i]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    if (context_out != nullptr) {
      context_out->repro_visible[i] = 1;
    }
    energy += loss.energy(std::sqrt(f.weight) * residual->norm());
  }
  const double lambda = problem.coupling_lambda();
  if (lambda > 0.0 && problem.map() != nullptr) {
    const double penalty = sdf_unobserved_penalty(problem, loss);
    for (const auto& [id, factor] : problem.sdf_factors()) {
      if (!factor.active) {
        continue;
      }
      const Eigen::Vector3d& p = state.landmark_pos[idx.landmark_block.at(id)];
      const auto residual = sdf_residual(*problem.map(), p);
      if (!residual) {
        energy += penalty;
        if (unobserved != nullptr) {
          unobserved->push_back(id);
        }
        continue;
      }
      energy += lambda * loss.energy(std::sqrt(factor.weight) * std::abs(*residual));
    }
  }
  return energy;
}

BlockSystem assemble(const Problem& problem, const Indexing& idx, const State& state,
                     const RobustLoss& loss) {
  BlockSystem system(static_cast<int>(idx.free_keyframes.size()),
                     static_cast<int>(idx.landmarks.size()));
  for (const ReprojectionFactor& f : problem.reprojection_factors()) {
    if (!f.active) {
      continue;
    }
    const Pose& pose = pose_of(problem, idx, state, f.keyframe);
    const int lm_block = idx.landmark_block.at(f.landmark);
    const auto jac =
        reprojection_jacobians(problem.intrinsics(), pose, state.landmark_pos[lm_block], f.measured);
    if (!jac) {
      continue;  // behind camera: silent for this iteration
    }
    const double scale = f.weight * loss.weight(std::sqrt(f.weight) * jac->residual.norm());
    system.add_landmark_block(lm_block, scale * jac->point.transpose() * jac->point,
                              -scale * jac->point.transpose() * jac->residual);
    const auto kf_it = idx.keyframe_block.find(f.keyframe);
    if (kf_it != idx.keyframe_block.end()) {
      system.add_pose_block(kf_it->second, scale * jac->pose.transpose() * jac->pose,
                            -scale * jac->pose.transpose() * jac->residual);
      system.add_coupling(kf_it->second, lm_block,
                          scale * jac->pose.transpose() * jac->point);
    }
  }
  const double lambda = problem.coupling_lambda();
  if (lambda > 0.0 && problem.map() != nullptr) {
    for (const auto& [id, factor] : problem.sdf_factors()) {
      if (!factor.active) {
        continue;
      }
      const int lm_block = idx.landmark_block.at(id);
      const auto jac = sdf_point_jacobian(*problem.map(), state.landmark_pos[lm_block]);
      if (!jac) {
        continue;
      }
      const double scale =
          lambda * factor.weight * loss.weight(std::sqrt(factor.weight) * std::abs(jac->residual));
      system.add_landmark_block(lm_block, scale * jac->point.transpose() * jac->point,
                                -scale * jac->point.transpose() * jac->residual);
    }
  }
  return system;
}

State apply_step(const State& state, const BlockSystem::Step& step) {
  State trial = state;
  for (size_t i = 0; i < trial.keyframe_pose.size(); ++i) {
    trial.keyframe_pose[i] = apply_twist(Twist::from_vector(step.pose.segment<6>(6 * i)),
                                         state.keyframe_pose[i]);
  }
  for (size_t i = 0; i < trial.landmark_pos.size(); ++i) {
    trial.landmark_pos[i] += step.landmark.segment<3>(3 * i);
  }
  return trial;
}

SolveReport run_lm_round(Problem& problem, const SolverConfig& config, int* migrations) {
  const RobustLoss loss{config.huber_delta};
  Indexing idx = build_indexing(problem, config.window);
  State state = snapshot_state(problem, idx);

  SolveReport report;
  report.termination = TerminationReason::kMaxIterations;

  // Migrate landmarks that are unobserved already at the initial state so
  // the energy baseline refers to a stable factor set.
  {
    std::vector<LandmarkId> unobserved;
    evaluate_energy(problem, idx, state, loss, &unobserved);
    for (const LandmarkId id : unobserved) {
      problem.migrate_to_vision_only(id);
      ++(*migrations);
    }
  }
  EvalContext context;
  double energy = evaluate_energy(problem, idx, state, loss, nullptr, nullptr, &context);
  {
    const EnergyBreakdown breakdown = problem_energy(problem, loss);
    report.initial_energy = breakdown.total;
    report.initial_repro_energy = breakdown.repro;
    report.initial_sdf_energy = problem.coupling_lambda() * breakdown.sdf;
  }
  report.accepted_energies.push_back(energy);

  double beta = config.beta0;
  bool done = false;
  for (int iteration = 0; iteration < config.max_iterations && !done; ++iteration) {
    ++report.iterations;
    const BlockSystem system = assemble(problem, idx, state, loss);

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
      if (std::sqrt(step.squared_norm()) < config.step_tol) {
        report.termination = TerminationReason::kConverged;
        done = true;
        break;
      }
      const State trial = apply_step(state, step);
      const double trial_energy = evaluate_energy(problem, idx, trial, loss, nullptr, &context);
      if (trial_energy < energy) {
        const double decrease = energy - trial_energy;
        state = trial;
        // Re-evaluate as the new current state. Landmarks whose SDF query
        // the accepted step carried out of observed space migrate M -> N
        // for good (the trial already paid their frozen contribution, so
        // the win was genuine); the baseline drops with the freed terms.
        std::vector<LandmarkId> unobserved;
        energy = evaluate_energy(problem, idx, state, loss, &unobserved, nullptr, &context);
        for (const LandmarkId id : unobserved) {
          problem.migrate_to_vision_only(id);
          ++(*migrations);
        }
        if (!unobserved.empty()) {
          energy = evaluate_energy(problem, idx, state, loss, nullptr, nullptr, &context);
        }
        report.accepted_energies.push_back(energy);
        beta = std::max(beta * config.beta_down, config.beta_min);
        if (decrease < config.energy_tol * std::max(energy, 1e-30)) {
          report.termination = TerminationReason::kConverged;
          done = true;
        }
        break;
      }
      if (beta >= config.beta_max) {
        report.termination = TerminationReason::kConverged;
        done = true;
        break;
      }
      beta = std::min(beta * config.beta_up, config.beta_max);
    }
  }

  write_back(problem, idx, state);
  {
    const EnergyBreakdown breakdown = problem_energy(problem, loss);
    report.final_energy = breakdown.total;
    report.final_repro_energy = breakdown.repro;
    report.final_sdf_energy = problem.coupling_lambda() * breakdown.sdf;
  }
  return report;
}

}  // namespace

EnergyBreakdown problem_energy(const Problem& problem, const RobustLoss& loss) {
  EnergyBreakdown breakdown;
  for (const ReprojectionFactor& f : problem.reprojection_factors()) {
    if (!f.active) {
      continue;
    }
    const Keyframe& kf = problem.keyframes().at(f.keyframe);
    const Landmark& lm = problem.landmarks().at(f.landmark);
    const auto residual =
        reprojection_residual(problem.intrinsics(), kf.camera_from_world, lm.position, f.measured);
    if (!residual) {
      continue;
    }
    breakdown.repro += loss.energy(std::sqrt(f.weight) * residual->norm());
  }
  if (problem.map() != nullptr) {
    for (const auto& [id, factor] : problem.sdf_factors()) {
      if (!factor.active) {
        continue;
      }
      const auto residual = sdf_residual(*problem.map(), problem.landmarks().at(id).position);
      if (!residual) {
        continue;
      }
      breakdown.sdf += loss.energy(std::sqrt(factor.weight) * std::abs(*residual));
    }
  }
  breakdown.total = breakdown.repro + problem.coupling_lambda() * breakdown.sdf;
  return breakdown;
}

OutlierClassification classify_outliers(Problem& problem, const SolverConfig& config) {
  OutlierClassification result;
  std::set<LandmarkId> amnesty;

  // Tolerant occlusion pass: an SDF misfit costs the factor, not the
  // landmark. The landmark gets the next round to re-converge visually.
  for (auto& [id, factor] : problem.sdf_factors()) {
    if (!factor.active) {
      continue;
    }
    const auto residual = sdf_residual(*problem.map(), problem.landmarks().at(id).position);
    const bool reject =
        !residual || factor.weight * (*residual) * (*residual) > config.th_sdf;
    if (reject) {
      factor.active = false;
      result.deactivated_sdf.push_back(id);
      amnesty.insert(id);
    }
  }

  for (const auto& [id, landmark] : problem.landmarks()) {
    if (amnesty.count(id) > 0) {
      continue;
    }
    bool outlier = false;
    for (const size_t obs : problem.observations_of(id)) {
      const ReprojectionFactor& f = problem.reprojection_factors()[obs];
      if (!f.active) {
        continue;
      }
      const Keyframe& kf = problem.keyframes().at(f.keyframe);
      const auto residual = reprojection_residual(problem.intrinsics(), kf.camera_from_world,
                                                  landmark.position, f.measured);
      if (!residual) {
        outlier = true;  // behind an observing camera in the final state
        break;
      }
      if (f.weight * residual->squaredNorm() > config.th_repro) {
        outlier = true;
        break;
      }
    }
    if (outlier) {
      result.outliers.push_back(id);
    }
  }
  return result;
}

JointReport joint_optimize(Problem& problem, const SolverConfig& config) {
  config.validate();
  problem.validate();
  if (problem.keyframes().size() < 2) {
    throw DegenerateProblemError("joint_optimize: need at least two keyframes");
  }

  // Per-solve deactivations must not leak in from a previous solve.
  problem.reset_factor_activation();

  // Gauge resolution. Keyframes outside the window are implicitly fixed.
  const Indexing idx = build_indexing(problem, config.window);
  const bool has_implicit_fixed =
      idx.free_keyframes.size() < problem.keyframes().size();
  const bool has_anchor = problem.has_fixed_keyframe() || has_implicit_fixed;
  const bool has_sdf = problem.active_sdf_factor_count() > 0 && problem.coupling_lambda() > 0.0;
  switch (config.gauge) {
    case GaugeMode::kFixedFirst:
      if (!problem.has_fixed_keyframe()) {
        problem.keyframes().begin()->second.fixed = true;
      }
      break;
    case GaugeMode::kSdfAnchored:
      if (!has_sdf && !has_anchor) {
        throw GaugeUnfixedError("joint_optimize: no fixed keyframe and no SDF factors");
      }
      break;
    case GaugeMode::kAuto:
      if (!has_anchor && !has_sdf) {
        problem.keyframes().begin()->second.fixed = true;
      }
      break;
  }

  JointReport report;
  report.round1 = run_lm_round(problem, config, &report.migrated_to_vision_only);

  const OutlierClassification first = classify_outliers(problem, config);
  report.sdf_factors_deactivated += static_cast<int>(first.deactivated_sdf.size());
  for (const LandmarkId id : first.outliers) {
    problem.remove_landmark(id);
    report.outlier_landmarks.push_back(id);
  }
  report.outliers_removed += static_cast<int>(first.outliers.size());

  report.round2 = run_lm_round(problem, config, &report.migrated_to_vision_only);

  // Final determination: residuals that stayed large after the second
  // round are dismissed, including landmarks amnestied above.
  const OutlierClassification final_pass = classify_outliers(problem, config);
  report.sdf_factors_deactivated += static_cast<int>(final_pass.deactivated_sdf.size());
  for (const LandmarkId id : final_pass.outliers) {
    problem.remove_landmark(id);
    report.outlier_landmarks.push_back(id);
  }
  report.outliers_removed += static_cast<int>(final_pass.outliers.size());
  return report;
}

}  // namespace sdfloc
