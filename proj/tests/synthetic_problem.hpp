// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixture: builds joint-optimization problems over the
// synthetic room with configurable observation noise, scale corruption
// and planted outliers, plus the ground truth needed to score results.

#pragma once

#include <memory>
#include <set>
#include <vector>

#include "sdfloc/map/map_builder.hpp"
#include "sdfloc/optim/problem.hpp"
#include "sdfloc/sim/random.hpp"
#include "sdfloc/sim/scene.hpp"
#include "sdfloc/sim/tracks.hpp"
#include "sdfloc/sim/trajectory.hpp"

namespace sdfloc::test {

struct SyntheticProblemOptions {
  int num_keyframes = 8;
  int num_anchors = 120;
  double sigma_px = 0.0;
  double scale_corruption = 1.0;      // applied about the first camera center
  double landmark_init_sigma = 0.0;   // extra noise on landmark initializations
  double fraction_pixel_outliers = 0.0;   // landmarks with 20 px corrupted tracks
  double fraction_map_inconsistent = 0.0; // landmarks displaced off-surface in truth
  double orbit_radius = 1.7;
  uint64_t seed = 1;
};

struct SyntheticProblem {
  std::unique_ptr<SdfMap> map;
  sim::SyntheticScene scene;
  sim::Trajectory gt_keyframes;
  std::unique_ptr<Problem> problem;
  std::vector<KeyframeId> keyframe_ids;
  std::vector<LandmarkId> landmark_ids;          // by anchor index, -1 if unused
  std::vector<Eigen::Vector3d> gt_landmarks;     // by anchor index
  std::set<LandmarkId> planted_outliers;
  std::set<LandmarkId> map_inconsistent;
};

inline CameraIntrinsics synthetic_camera() {
  return CameraIntrinsics(380.0, 380.0, 320.0, 240.0, 640, 480);
}

// Room map with padded bounds and generous truncation so that scale
// corruptions up to +-20% keep every landmark inside observed space.
inline std::unique_ptr<SdfMap> synthetic_room_map(double voxel_size = 0.1,
                                                  double truncation = 2.0,
                                                  double padding = 1.6) {
  MapBuildOptions options;
  options.voxel_size = voxel_size;
  options.truncation_distance = truncation;
  MapBounds bounds = sim::room_bounds(voxel_size);
  bounds.min -= Eigen::Vector3d::Constant(padding);
  bounds.max += Eigen::Vector3d::Constant(padding);
  return build_from_analytic(sim::room_primitives(), bounds, options);
}

inline SyntheticProblem make_synthetic_problem(const SyntheticProblemOptions& options) {
  SyntheticProblem out;
  out.map = synthetic_room_map();
  const MapBounds anchor_bounds = sim::room_bounds(out.map->voxel_size());
  out.scene = sim::make_scene(sim::room_primitives(), anchor_bounds, options.num_anchors,
                              options.seed);
  out.gt_keyframes = sim::make_orbit_trajectory({0.0, 0.0, 0.6}, options.orbit_radius, 0.9,
                                                options.num_keyframes, 10.0, 0.9);

  sim::TrackSimOptions track_options;
  track_options.sigma_px = options.sigma_px;
  const sim::TrackTable tracks = sim::generate_tracks(out.scene, out.gt_keyframes,
                                                      synthetic_camera(), track_options,
                                                      options.seed);

  sim::Rng rng(sim::mix_seed(options.seed, 0xabcdeULL));

  // True landmark positions; a chosen fraction is displaced off-surface to
  // model scene changes the prior map does not know about.
  out.gt_landmarks.assign(out.scene.anchors.begin(), out.scene.anchors.end());
  const int num_anchors = static_cast<int>(out.scene.anchors.size());

  out.problem = std::make_unique<Problem>(out.map.get(), synthetic_camera(), 1.0);

  const Eigen::Vector3d scale_center = out.gt_keyframes.frames.front().world_from_camera
                                           .translation();
  const double s = options.scale_corruption;
  for (int k = 0; k < options.num_keyframes; ++k) {
    const Pose& gt = out.gt_keyframes.frames[k].world_from_camera;
    const Eigen::Vector3d scaled_center = scale_center + s * (gt.translation() - scale_center);
    out.keyframe_ids.push_back(
        out.problem->add_keyframe(Pose(gt.rotation(), scaled_center).inverse()));
  }

  out.landmark_ids.assign(num_anchors, -1);
  for (int a = 0; a < num_anchors; ++a) {
    const auto& observations = tracks.of_anchor(a);
    if (observations.size() < 2) {
      continue;
    }
    sim::Rng anchor_rng = rng.fork(static_cast<uint64_t>(a));
    const bool displaced =
        anchor_rng.uniform() < options.fraction_map_inconsistent;
    if (displaced) {
      // Push the true point off the surface along the outward normal.
      const Eigen::Vector3d normal =
          scene_signed_distance_gradient(out.scene.primitives, out.gt_landmarks[a]);
      out.gt_landmarks[a] += 0.35 * normal;
    }

    const Eigen::Vector3d init =
        scale_center + s * (out.gt_landmarks[a] - scale_center) +
        anchor_rng.gaussian_vector(options.landmark_init_sigma);
    const LandmarkId lm =
        out.problem->add_landmark(init, LandmarkSet::kMapConstrained);
    out.landmark_ids[a] = lm;
    if (displaced) {
      out.map_inconsistent.insert(lm);
    }

    // Corruption is planted on landmarks with three or more views; a
    // two-view landmark can absorb independent pixel offsets by
    // re-triangulating, which makes the corruption unobservable.
    const bool corrupt_pixels =
        observations.size() >= 3 && anchor_rng.uniform() < options.fraction_pixel_outliers;
    if (corrupt_pixels) {
      out.planted_outliers.insert(lm);
    }
    for (const size_t obs_index : observations) {
      const sim::TrackObservation& obs = tracks.observations()[obs_index];
      // The track table carries noisy projections of the original anchor;
      // displaced landmarks get fresh observations of their true position.
      Pixel measured = obs.pixel;
      if (displaced) {
        const auto px =
            project(synthetic_camera(),
                    out.gt_keyframes.frames[obs.keyframe].world_from_camera.inverse() *
                        out.gt_landmarks[a]);
        if (!px) {
          continue;
        }
        measured = *px;
        measured.u += anchor_rng.gaussian(options.sigma_px);
        measured.v += anchor_rng.gaussian(options.sigma_px);
      }
      if (corrupt_pixels) {
        const double angle = anchor_rng.uniform(0.0, 2.0 * M_PI);
        measured.u += 20.0 * std::cos(angle);
        measured.v += 20.0 * std::sin(angle);
      }
      out.problem->add_observation(lm, out.keyframe_ids[obs.keyframe], measured);
    }
  }
  return out;
}

}  // namespace sdfloc::test
