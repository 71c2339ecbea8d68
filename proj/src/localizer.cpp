// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/pipeline/localizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "sdfloc/errors.hpp"
#include "sdfloc/map/map_io.hpp"
#include "sdfloc/optim/joint_optimizer.hpp"
#include "sdfloc/optim/pose_refinement.hpp"
#include "sdfloc/optim/structure_refinement.hpp"
#include "sdfloc/sim/landmark_factory.hpp"
#include "sdfloc/sim/odometry_noise.hpp"
#include "sdfloc/sim/scene.hpp"
#include "sdfloc/sim/tracks.hpp"

namespace sdfloc::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Bounding box of the map's allocated blocks, used for anchor sampling.
MapBounds map_bounds(const SdfMap& map) {
  MapBounds bounds;
  bool first = true;
  const double block_extent = VoxelBlock::kEdge * map.voxel_size();
  for (const auto& [index, block] : map.blocks()) {
    const Eigen::Vector3d lo =
        map.origin() + block_extent * Eigen::Vector3d(index.x, index.y, index.z);
    const Eigen::Vector3d hi = lo + Eigen::Vector3d::Constant(block_extent);
    if (first) {
      bounds.min = lo;
      bounds.max = hi;
      first = false;
    } else {
      bounds.min = bounds.min.cwiseMin(lo);
      bounds.max = bounds.max.cwiseMax(hi);
    }
  }
  return bounds;
}

Pose initial_perturbation(const PipelineConfig& config) {
  const double d2r = M_PI / 180.0;
  const Twist xi({config.init_perturb_tx, config.init_perturb_ty, config.init_perturb_tz},
                 {config.init_perturb_rx_deg * d2r, config.init_perturb_ry_deg * d2r,
                  config.init_perturb_rz_deg * d2r});
  return exp_twist(xi);
}

void write_outputs(const PipelineConfig& config, const LocalizationResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto path = [&](const char* name) { return (fs::path(config.output_dir) / name).string(); };

  sim::save_trajectory(result.estimated, path("trajectory_est.txt"));
  sim::save_trajectory(result.odometry, path("trajectory_odom.txt"));

  {
    std::ofstream csv(path("per_frame.csv"));
    std::ofstream jsonl(path("per_frame.jsonl"));
    csv << "frame,timestamp,translation_error,rotation_error_deg\n";
    char buf[256];
    for (size_t i = 0; i < result.report.ate.per_frame.size(); ++i) {
      const eval::FrameError& err = result.report.ate.per_frame[i];
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, err.timestamp,
                    err.translation, err.rotation_deg);
      csv << buf;
      std::snprintf(buf, sizeof(buf),
                    "{\"frame\":%zu,\"timestamp\":%.17g,\"translation_error\":%.17g,"
                    "\"rotation_error_deg\":%.17g}\n",
                    i, err.timestamp, err.translation, err.rotation_deg);
      jsonl << buf;
    }
  }

  std::ofstream txt(path("report.txt"));
  const EvaluationReport& r = result.report;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "keyframes:            %d\n"
                "ate_translation_rmse: %.6f m\n"
                "ate_rotation_rmse:    %.6f deg\n"
                "structure_rmse:       %.6f m\n"
                "landmarks:            %d map-constrained, %d vision-only, %d deferred\n"
                "outliers_removed:     %d\n"
                "sdf_deactivated:      %d\n"
                "migrated_M_to_N:      %d\n"
                "frames_not_converged: %d\n"
                "time: pose_refine %.1f ms, landmarks %.1f ms, structure %.1f ms, "
                "joint %.1f ms, total %.1f ms\n",
                r.keyframes, r.ate.translation_rmse, r.ate.rotation_rmse_deg, r.structure_rmse,
                r.landmarks_map_constrained, r.landmarks_vision_only, r.landmarks_deferred,
                r.outliers_removed, r.sdf_factors_deactivated, r.migrated_to_vision_only,
                r.frames_not_converged, r.timings.pose_refine_ms,
                r.timings.landmark_generation_ms, r.timings.structure_refine_ms,
                r.timings.joint_ms, r.timings.total_ms);
  txt << buf;
}

}  // namespace

LocalizationResult run_localization(const PipelineConfig& config) {
  return run_localization(config, false);
}

LocalizationResult run_localization(const PipelineConfig& config, bool localization_disabled) {
  config.validate();
  const auto t_total = Clock::now();

  const auto map = load_map(config.map_file);
  const std::vector<Primitive> primitives = load_scene_file(config.scene_file);
  const sim::Trajectory full_gt = sim::load_trajectory(config.trajectory_file);
  if (full_gt.size() < 2) {
    throw ConfigError("run_localization: trajectory needs at least 2 frames");
  }

  // Corrupt at full frame rate, then subsample keyframes.
  const sim::OdometryNoiseModel noise{config.sigma_odom_t,
                                      config.sigma_odom_r_deg * M_PI / 180.0, config.odom_scale};
  const sim::Trajectory full_odo = sim::corrupt_odometry(full_gt, noise, config.seed);

  sim::Trajectory gt_keyframes, odo_keyframes;
  for (size_t i = 0; i < full_gt.size(); i += config.keyframe_stride) {
    gt_keyframes.frames.push_back(full_gt.frames[i]);
    odo_keyframes.frames.push_back(full_odo.frames[i]);
  }
  const int num_kf = static_cast<int>(gt_keyframes.size());

  const sim::SyntheticScene scene =
      sim::make_scene(primitives, map_bounds(*map), config.num_anchors, config.seed);
  const CameraIntrinsics intrinsics = config.intrinsics();
  sim::TrackSimOptions track_options;
  track_options.sigma_px = config.sigma_px;
  track_options.max_level = config.max_level;
  const sim::TrackTable tracks =
      sim::generate_tracks(scene, gt_keyframes, intrinsics, track_options, config.seed);

  LocalizationResult result;
  result.ground_truth = gt_keyframes;
  result.odometry = odo_keyframes;
  EvaluationReport& report = result.report;
  report.keyframes = num_kf;

  Problem problem(map.get(), intrinsics, config.solver.lambda);
  std::map<int, KeyframeId> kf_ids;           // trajectory index -> problem id
  std::map<int, LandmarkId> anchor_landmark;  // anchor -> problem landmark
  std::set<int> deferred_anchors;

  const Pose perturb = initial_perturbation(config);
  Pose prev_world_from_camera;  // previous keyframe estimate

  for (int k = 0; k < num_kf; ++k) {
    // (1) Odometry-propagated pose.
    Pose world_from_camera;
    if (k == 0) {
      world_from_camera = perturb * odo_keyframes.frames[0].world_from_camera;
    } else {
      const Pose delta = odo_keyframes.frames[k - 1].world_from_camera.inverse() *
                         odo_keyframes.frames[k].world_from_camera;
      world_from_camera = prev_world_from_camera * delta;
    }

    // With lambda = 0 the run is a vision-only baseline: no SDF pose
    // alignment, and the structure/joint stages ignore the SDF factors.
    if (!localization_disabled && config.solver.lambda > 0.0) {
      // (2) SDF pose refinement on the tracked map-constrained structure.
      const auto t0 = Clock::now();
      const auto local = sim::camera_frame_structure(scene, gt_keyframes, tracks, k,
                                                     config.structure_sigma, config.odom_scale,
                                                     config.seed);
      std::vector<Eigen::Vector3d> refine_points;
      for (const auto& [anchor, p_cam] : local) {
        const auto it = anchor_landmark.find(anchor);
        if (it != anchor_landmark.end()) {
          const auto lm = problem.landmarks().find(it->second);
          if (lm != problem.landmarks().end() &&
              lm->second.set == LandmarkSet::kMapConstrained) {
            refine_points.push_back(p_cam);
          }
        }
      }
      if (static_cast<int>(refine_points.size()) >= config.solver.min_pose_refine_points) {
        try {
          PoseRefineResult refined =
              refine_pose(*map, world_from_camera, refine_points, config.solver);
          world_from_camera = refined.world_from_camera;
          if (!refined.report.converged()) {
            ++report.frames_not_converged;
          }
        } catch (const DegenerateProblemError&) {
          // Too few observed queries at this pose; keep the propagated pose.
        }
      }
      report.timings.pose_refine_ms += ms_since(t0);
    }

    const KeyframeId kf_id = problem.add_keyframe(world_from_camera.inverse());
    kf_ids[k] = kf_id;

    // Reprojection factors of already-known landmarks seen in this frame.
    for (const size_t obs_index : tracks.of_keyframe(k)) {
      const sim::TrackObservation& obs = tracks.observations()[obs_index];
      const auto it = anchor_landmark.find(obs.anchor);
      if (it != anchor_landmark.end() && problem.landmarks().count(it->second) > 0) {
        problem.add_observation(it->second, kf_id, obs.pixel);
      }
    }

    if (!localization_disabled) {
      // (3) Landmark generation for new anchors.
      const auto t1 = Clock::now();
      for (const size_t obs_index : tracks.of_keyframe(k)) {
        const sim::TrackObservation& obs = tracks.observations()[obs_index];
        if (anchor_landmark.count(obs.anchor) > 0) {
          continue;
        }
        std::vector<sim::ViewOfLandmark> other_views;
        for (const size_t past_index : tracks.of_anchor(obs.anchor)) {
          const sim::TrackObservation& past = tracks.observations()[past_index];
          const auto past_kf = kf_ids.find(past.keyframe);
          if (past.keyframe != k && past_kf != kf_ids.end()) {
            other_views.push_back(sim::ViewOfLandmark{
                problem.keyframes().at(past_kf->second).camera_from_world, past.pixel});
          }
        }
        // The zero-crossing depth prior is part of the SDF coupling; a
        // lambda = 0 baseline builds its structure from triangulation
        // alone.
        const double raycast_range =
            config.solver.lambda > 0.0 ? config.max_raycast_range : 0.0;
        const sim::GeneratedLandmark generated = sim::generate_landmark(
            *map, intrinsics, problem.keyframes().at(kf_id).camera_from_world, obs.pixel,
            other_views, raycast_range, config.solver.min_parallax_deg);
        if (generated.birth == sim::LandmarkBirth::kDegenerate) {
          deferred_anchors.insert(obs.anchor);
          continue;
        }
        deferred_anchors.erase(obs.anchor);
        const LandmarkId lm_id = problem.add_landmark(generated.position, generated.set);
        anchor_landmark[obs.anchor] = lm_id;
        for (const size_t seen_index : tracks.of_anchor(obs.anchor)) {
          const sim::TrackObservation& seen = tracks.observations()[seen_index];
          const auto seen_kf = kf_ids.find(seen.keyframe);
          if (seen_kf != kf_ids.end()) {
            problem.add_observation(lm_id, seen_kf->second, seen.pixel);
          }
        }
      }
      report.timings.landmark_generation_ms += ms_since(t1);

      // (4) Structure-only refinement.
      const auto t2 = Clock::now();
      const StructureReport structure = refine_structure(problem, config.solver);
      report.migrated_to_vision_only += structure.migrated_to_vision_only;
      report.timings.structure_refine_ms += ms_since(t2);

      // (5) Joint optimization over the window.
      if (problem.keyframes().size() >= 2 &&
          (k % config.joint_every == 0 || k == num_kf - 1)) {
        const auto t3 = Clock::now();
        try {
          const JointReport joint = joint_optimize(problem, config.solver);
          report.outliers_removed += joint.outliers_removed;
          report.sdf_factors_deactivated += joint.sdf_factors_deactivated;
          report.migrated_to_vision_only += joint.migrated_to_vision_only;
          if (!joint.round2.converged()) {
            ++report.frames_not_converged;
          }
        } catch (const DegenerateProblemError& e) {
          throw DegenerateProblemError("frame " + std::to_string(k) + ": " + e.what());
        } catch (const GaugeUnfixedError& e) {
          throw GaugeUnfixedError("frame " + std::to_string(k) + ": " + e.what());
        }
        report.timings.joint_ms += ms_since(t3);
      }
    }

    prev_world_from_camera =
        problem.keyframes().at(kf_id).camera_from_world.inverse();
  }

  // Collect outputs: final poses and landmarks.
  result.estimated.frames.reserve(num_kf);
  for (int k = 0; k < num_kf; ++k) {
    result.estimated.frames.push_back(
        sim::TrajectoryFrame{gt_keyframes.frames[k].timestamp,
                             problem.keyframes().at(kf_ids.at(k)).camera_from_world.inverse()});
  }
  for (const auto& [id, landmark] : problem.landmarks()) {
    result.landmark_positions.push_back(landmark.position);
    if (landmark.set == LandmarkSet::kMapConstrained) {
      ++report.landmarks_map_constrained;
    } else {
      ++report.landmarks_vision_only;
    }
  }
  report.landmarks_deferred = static_cast<int>(deferred_anchors.size());

  report.ate = eval::compute_ate(result.estimated, gt_keyframes, eval::Alignment::kNone);
  report.structure_rmse = eval::structure_rmse(result.landmark_positions, primitives);
  report.timings.total_ms = ms_since(t_total);

  if (!config.output_dir.empty()) {
    write_outputs(config, result);
  }
  return result;
}

std::vector<SweepCell> perturbation_sweep(const PipelineConfig& config, const std::string& axis,
                                          const std::vector<double>& magnitudes,
                                          double rotation_deg, int seeds_per_cell) {
  if (magnitudes.empty()) {
    throw ConfigError("perturbation_sweep: magnitudes must be non-empty");
  }
  if (axis != "x" && axis != "y" && axis != "z") {
    throw ConfigError("perturbation_sweep: axis must be x, y or z");
  }
  std::vector<SweepCell> cells;
  for (const double magnitude : magnitudes) {
    for (int s = 0; s < seeds_per_cell; ++s) {
      PipelineConfig run = config;
      run.output_dir.clear();
      run.seed = config.seed + static_cast<uint64_t>(s);
      run.init_perturb_tx = axis == "x" ? magnitude : 0.0;
      run.init_perturb_ty = axis == "y" ? magnitude : 0.0;
      run.init_perturb_tz = axis == "z" ? magnitude : 0.0;
      run.init_perturb_rx_deg = axis == "x" ? rotation_deg : 0.0;
      run.init_perturb_ry_deg = axis == "y" ? rotation_deg : 0.0;
      run.init_perturb_rz_deg = axis == "z" ? rotation_deg : 0.0;

      SweepCell cell;
      cell.axis = axis;
      cell.magnitude = magnitude;
      cell.rotation_deg = rotation_deg;
      cell.seed = run.seed;
      try {
        const LocalizationResult result = run_localization(run);
        cell.completed = true;
        cell.ate_translation_rmse = result.report.ate.translation_rmse;
        cell.ate_rotation_rmse_deg = result.report.ate.rotation_rmse_deg;
        cell.frames_not_converged = result.report.frames_not_converged;
      } catch (const std::exception&) {
        cell.completed = false;  // recorded as a failed cell; sweep continues
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void save_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write sweep csv: " + path);
  }
  out << "axis,magnitude,rotation_deg,seed,completed,ate_translation_rmse,"
         "ate_rotation_rmse_deg,frames_not_converged\n";
  char buf[256];
  for (const SweepCell& cell : cells) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%llu,%d,%.17g,%.17g,%d\n", cell.axis.c_str(),
                  cell.magnitude, cell.rotation_deg,
                  static_cast<unsigned long long>(cell.seed), cell.completed ? 1 : 0,
                  cell.ate_translation_rmse, cell.ate_rotation_rmse_deg,
                  cell.frames_not_converged);
    out << buf;
  }
}

}  // namespace sdfloc::pipeline
