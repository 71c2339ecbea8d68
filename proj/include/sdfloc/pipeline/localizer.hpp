// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Track-then-localize pipeline over a synthetic sequence. For every
// keyframe: propagate the pose along the corrupted odometry, refine it
// against the SDF using the front-end's tracked camera-frame structure,
// generate landmarks (ray casting first, triangulation fallback), refine
// the structure, and jointly optimize poses and structure over the
// window.

#pragma once

#include <string>
#include <vector>

#include "sdfloc/pipeline/config.hpp"
#include "sdfloc/pipeline/evaluation.hpp"
#include "sdfloc/sim/trajectory.hpp"

namespace sdfloc::pipeline {

struct StageTimings {
  double pose_refine_ms = 0.0;
  double landmark_generation_ms = 0.0;
  double structure_refine_ms = 0.0;
  double joint_ms = 0.0;
  double total_ms = 0.0;
};

struct EvaluationReport {
  eval::AteResult ate;          // against ground truth, no alignment
  double structure_rmse = 0.0;  // landmarks vs analytic scene
  int keyframes = 0;
  int landmarks_map_constrained = 0;
  int landmarks_vision_only = 0;
  int landmarks_deferred = 0;
  int outliers_removed = 0;
  int sdf_factors_deactivated = 0;
  int migrated_to_vision_only = 0;
  int frames_not_converged = 0;
  StageTimings timings;
};

struct LocalizationResult {
  EvaluationReport report;
  sim::Trajectory estimated;     // keyframe poses, world_from_camera
  sim::Trajectory ground_truth;  // the matching keyframe subset
  sim::Trajectory odometry;      // corrupted odometry at the keyframes
  std::vector<Eigen::Vector3d> landmark_positions;
};

/// Runs the pipeline. When config.output_dir is non-empty, writes
/// trajectory_est.txt, trajectory_odom.txt, per_frame.csv, per_frame.jsonl
/// and report.txt there (creating the directory). Deterministic per
/// config + seed, byte-identical outputs included.
LocalizationResult run_localization(const PipelineConfig& config);

/// When true, run_localization runs the odometry through without any
/// refinement (paired-baseline mode for drift-correction comparisons).
LocalizationResult run_localization(const PipelineConfig& config, bool localization_disabled);

/// One cell of the initialization-robustness study.
struct SweepCell {
  std::string axis;
  double magnitude = 0.0;       // m, translation along the axis
  double rotation_deg = 0.0;    // about the same axis
  uint64_t seed = 0;
  bool completed = false;       // false: run failed (recorded, not fatal)
  double ate_translation_rmse = 0.0;
  double ate_rotation_rmse_deg = 0.0;
  int frames_not_converged = 0;
};

/// Perturbs the initial pose along `axis` (x|y|z) by each magnitude
/// (meters) combined with `rotation_deg` about the same axis, and runs
/// `seeds_per_cell` localizations per magnitude. Failures are recorded as
/// incomplete cells and the sweep continues.
std::vector<SweepCell> perturbation_sweep(const PipelineConfig& config, const std::string& axis,
                                          const std::vector<double>& magnitudes,
                                          double rotation_deg, int seeds_per_cell);

/// CSV export of sweep results (header + one row per cell).
void save_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);

}  // namespace sdfloc::pipeline
