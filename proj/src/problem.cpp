// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/problem.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sdfloc {

Problem::Problem(const SdfMap* map, const CameraIntrinsics& intrinsics, double lambda)
    : map_(map), intrinsics_(intrinsics), lambda_(lambda) {}

KeyframeId Problem::add_keyframe(const Pose& camera_from_world, bool fixed) {
  const KeyframeId id = next_keyframe_id_++;
  keyframes_[id] = Keyframe{camera_from_world, fixed};
  return id;
}

LandmarkId Problem::add_landmark(const Eigen::Vector3d& position, LandmarkSet set) {
  const LandmarkId id = next_landmark_id_++;
  landmarks_[id] = Landmark{position, set};
  if (set == LandmarkSet::kMapConstrained) {
    const double sigma = map_ != nullptr ? map_->sigma_sdf() : 1.0;
    sdf_factors_[id] = SdfFactor{id, 1.0 / (sigma * sigma), true};
  }
  return id;
}

void Problem::add_observation(LandmarkId landmark, KeyframeId keyframe, const Pixel& measured) {
  if (landmarks_.count(landmark) == 0 || keyframes_.count(keyframe) == 0) {
    throw std::logic_error("Problem::add_observation: unknown landmark or keyframe");
  }
  reprojection_factors_.push_back(
      ReprojectionFactor{landmark, keyframe, measured, reprojection_weight(measured.level), true});
}

void Problem::remove_landmark(LandmarkId id) {
  landmarks_.erase(id);
  sdf_factors_.erase(id);
  std::erase_if(reprojection_factors_,
                [id](const ReprojectionFactor& f) { return f.landmark == id; });
}

void Problem::migrate_to_vision_only(LandmarkId id) {
  const auto it = landmarks_.find(id);
  if (it == landmarks_.end()) {
    return;
  }
  it->second.set = LandmarkSet::kVisionOnly;
  sdf_factors_.erase(id);
}

std::vector<size_t> Problem::observations_of(LandmarkId id) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < reprojection_factors_.size(); ++i) {
    if (reprojection_factors_[i].landmark == id) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<KeyframeId> Problem::observing_keyframes(LandmarkId id) const {
  std::set<KeyframeId> seen;
  for (const ReprojectionFactor& f : reprojection_factors_) {
    if (f.landmark == id) {
      seen.insert(f.keyframe);
    }
  }
  return {seen.begin(), seen.end()};
}

bool Problem::has_fixed_keyframe() const {
  return std::any_of(keyframes_.begin(), keyframes_.end(),
                     [](const auto& kv) { return kv.second.fixed; });
}

size_t Problem::active_sdf_factor_count() const {
  size_t n = 0;
  for (const auto& [id, factor] : sdf_factors_) {
    n += factor.active ? 1 : 0;
  }
  return n;
}

void Problem::reset_factor_activation() {
  for (auto& [id, factor] : sdf_factors_) {
    factor.active = true;
  }
  for (ReprojectionFactor& factor : reprojection_factors_) {
    factor.active = true;
  }
}

void Problem::validate() const {
  for (const auto& [id, landmark] : landmarks_) {
    const bool has_sdf = sdf_factors_.count(id) > 0;
    if (landmark.set == LandmarkSet::kMapConstrained && !has_sdf) {
      throw std::logic_error("Problem: map-constrained landmark without SDF factor");
    }
    if (landmark.set == LandmarkSet::kVisionOnly && has_sdf) {
      throw std::logic_error("Problem: vision-only landmark with SDF factor");
    }
  }
  for (const auto& [id, factor] : sdf_factors_) {
    if (factor.landmark != id || landmarks_.count(id) == 0) {
      throw std::logic_error("Problem: dangling SDF factor");
    }
    if (!(factor.weight > 0.0)) {
      throw std::logic_error("Problem: SDF factor weight must be positive");
    }
  }
  for (const ReprojectionFactor& factor : reprojection_factors_) {
    if (landmarks_.count(factor.landmark) == 0 || keyframes_.count(factor.keyframe) == 0) {
      throw std::logic_error("Problem: dangling reprojection factor");
    }
    if (!(factor.weight > 0.0)) {
      throw std::logic_error("Problem: reprojection factor weight must be positive");
    }
  }
}

}  // namespace sdfloc
