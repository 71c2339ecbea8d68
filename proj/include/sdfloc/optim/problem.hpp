// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Joint optimization state X = (P, T): keyframe poses, landmark positions
// and the factor blocks tying them together. Landmarks carry a membership
// tag: map-constrained (the paper's set M, exactly one SDF factor) or
// vision-only (set N, no SDF factor).

#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sdfloc/factors/factors.hpp"
#include "sdfloc/geometry/camera.hpp"
#include "sdfloc/geometry/se3.hpp"
#include "sdfloc/map/sdf_map.hpp"

namespace sdfloc {

using KeyframeId = int;
using LandmarkId = int;

enum class LandmarkSet { kMapConstrained, kVisionOnly };

struct Keyframe {
  Pose camera_from_world;
  bool fixed = false;
};

struct Landmark {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  LandmarkSet set = LandmarkSet::kVisionOnly;
};

struct SdfFactor {
  LandmarkId landmark = -1;
  double weight = 1.0;  // 1 / sigma_sdf^2
  bool active = true;
};

struct ReprojectionFactor {
  LandmarkId landmark = -1;
  KeyframeId keyframe = -1;
  Pixel measured;
  double weight = 1.0;  // 1 / sigma_level^2
  bool active = true;
};

class Problem {
 public:
  Problem(const SdfMap* map, const CameraIntrinsics& intrinsics, double lambda);

  const SdfMap* map() const { return map_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  double coupling_lambda() const { return lambda_; }
  void set_coupling_lambda(double lambda) { lambda_ = lambda; }

  KeyframeId add_keyframe(const Pose& camera_from_world, bool fixed = false);
  /// Map-constrained landmarks get their SDF factor (weight 1/sigma_sdf^2)
  /// created here; vision-only landmarks get none.
  LandmarkId add_landmark(const Eigen::Vector3d& position, LandmarkSet set);
  void add_observation(LandmarkId landmark, KeyframeId keyframe, const Pixel& measured);

  /// Drops the landmark and every factor that references it.
  void remove_landmark(LandmarkId id);

  /// Permanently moves a map-constrained landmark to the vision-only set,
  /// dropping its SDF factor.
  void migrate_to_vision_only(LandmarkId id);

  std::map<KeyframeId, Keyframe>& keyframes() { return keyframes_; }
  const std::map<KeyframeId, Keyframe>& keyframes() const { return keyframes_; }
  std::map<LandmarkId, Landmark>& landmarks() { return landmarks_; }
  const std::map<LandmarkId, Landmark>& landmarks() const { return landmarks_; }

  std::map<LandmarkId, SdfFactor>& sdf_factors() { return sdf_factors_; }
  const std::map<LandmarkId, SdfFactor>& sdf_factors() const { return sdf_factors_; }
  std::vector<ReprojectionFactor>& reprojection_factors() { return reprojection_factors_; }
  const std::vector<ReprojectionFactor>& reprojection_factors() const {
    return reprojection_factors_;
  }

  /// Indices into reprojection_factors() for one landmark (its observation
  /// set F_i).
  std::vector<size_t> observations_of(LandmarkId id) const;
  /// Keyframes that observe the landmark.
  std::vector<KeyframeId> observing_keyframes(LandmarkId id) const;

  bool has_fixed_keyframe() const;
  size_t active_sdf_factor_count() const;

  /// Re-arms every surviving factor; solves call this on entry so that
  /// per-solve deactivations (occlusion tolerance, behind-camera) do not
  /// leak across solves.
  void reset_factor_activation();

  /// Checks the structural invariants (M/N factor pairing, factor
  /// references); throws std::logic_error on violation.
  void validate() const;

 private:
  const SdfMap* map_;
  CameraIntrinsics intrinsics_;
  double lambda_;
  KeyframeId next_keyframe_id_ = 0;
  LandmarkId next_landmark_id_ = 0;
  std::map<KeyframeId, Keyframe> keyframes_;
  std::map<LandmarkId, Landmark> landmarks_;
  std::map<LandmarkId, SdfFactor> sdf_factors_;
  std::vector<ReprojectionFactor> reprojection_factors_;
};

}  // namespace sdfloc
