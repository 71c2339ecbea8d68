// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic stand-in for a feature-tracking front-end: given the true
// trajectory and scene, it produces per-keyframe pixel observations of the
// surface anchors (with analytic occlusion testing and Gaussian pixel
// noise) and, on request, the tracked 3D correspondences in the camera
// frame that a locally-consistent odometry would hand over.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sdfloc/geometry/camera.hpp"
#include "sdfloc/sim/scene.hpp"
#include "sdfloc/sim/trajectory.hpp"

namespace sdfloc::sim {

struct TrackObservation {
  int anchor = -1;     // landmark id: index into SyntheticScene::anchors
  int keyframe = -1;   // index into the keyframe trajectory
  Pixel pixel;
};

class TrackTable {
 public:
  void add(const TrackObservation& obs);

  const std::vector<TrackObservation>& observations() const { return observations_; }
  /// Observation indices for one keyframe, in anchor order.
  const std::vector<size_t>& of_keyframe(int keyframe) const;
  /// Observation indices for one anchor, in keyframe order.
  const std::vector<size_t>& of_anchor(int anchor) const;
  bool is_visible(int anchor, int keyframe) const;
  const TrackObservation* find(int anchor, int keyframe) const;

  /// CSV export: header + one `landmark_id,keyframe_id,u,v,level` row per
  /// observation.
  void export_csv(const std::string& path) const;

 private:
  std::vector<TrackObservation> observations_;
  std::map<int, std::vector<size_t>> by_keyframe_;
  std::map<int, std::vector<size_t>> by_anchor_;
};

struct TrackSimOptions {
  double sigma_px = 0.5;   // level-0 pixel noise, clamped at 6 sigma
  int max_level = 0;       // observations get a level in [0, max_level]
  int min_features_per_frame = 8;
  double min_depth = 0.05;
};

/// Simulates tracking over the keyframe trajectory. Visibility requires
/// the anchor to project inside the image, lie in front of the camera and
/// pass an exact ray-occlusion test against the primitives. Deterministic
/// per seed. Throws NoVisibleFeaturesError if any keyframe sees fewer than
/// min_features_per_frame anchors.
TrackTable generate_tracks(const SyntheticScene& scene, const Trajectory& keyframes,
                           const CameraIntrinsics& intrinsics, const TrackSimOptions& options,
                           uint64_t seed);

/// The front-end's tracked 3D correspondences for one keyframe: anchor
/// positions in the true camera frame, scaled by `structure_scale` (a
/// mis-scaled odometry sees a mis-scaled local structure) and perturbed
/// with Gaussian noise of structure_sigma. Returns pairs (anchor id,
/// camera-frame point) for the anchors visible in that keyframe.
std::vector<std::pair<int, Eigen::Vector3d>> camera_frame_structure(
    const SyntheticScene& scene, const Trajectory& keyframes, const TrackTable& table,
    int keyframe, double structure_sigma, double structure_scale, uint64_t seed);

}  // namespace sdfloc::sim
