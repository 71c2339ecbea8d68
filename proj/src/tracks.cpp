// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/sim/tracks.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "sdfloc/errors.hpp"
#include "sdfloc/factors/factors.hpp"
#include "sdfloc/sim/random.hpp"

namespace sdfloc::sim {
namespace {

const std::vector<size_t> kNoObservations;

double clamped_gaussian(Rng& rng, double sigma, double clamp) {
  return std::clamp(rng.gaussian(sigma), -clamp, clamp);
}

}  // namespace

void TrackTable::add(const TrackObservation& obs) {
  const size_t index = observations_.size();
  observations_.push_back(obs);
  by_keyframe_[obs.keyframe].push_back(index);
  by_anchor_[obs.anchor].push_back(index);
}

const std::vector<size_t>& TrackTable::of_keyframe(int keyframe) const {
  const auto it = by_keyframe_.find(keyframe);
  return it != by_keyframe_.end() ? it->second : kNoObservations;
}

const std::vector<size_t>& TrackTable::of_anchor(int anchor) const {
  const auto it = by_anchor_.find(anchor);
  return it != by_anchor_.end() ? it->second : kNoObservations;
}

bool TrackTable::is_visible(int anchor, int keyframe) const {
  return find(anchor, keyframe) != nullptr;
}

const TrackObservation* TrackTable::find(int anchor, int keyframe) const {
  for (const size_t index : of_anchor(anchor)) {
    if (observations_[index].keyframe == keyframe) {
      return &observations_[index];
    }
  }
  return nullptr;
}

void TrackTable::export_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write track csv: " + path);
  }
  out << "landmark_id,keyframe_id,u,v,level\n";
  char buf[128];
  for (const TrackObservation& obs : observations_) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.9f,%.9f,%d\n", obs.anchor, obs.keyframe, obs.pixel.u,
                  obs.pixel.v, obs.pixel.level);
    out << buf;
  }
}

TrackTable generate_tracks(const SyntheticScene& scene, const Trajectory& keyframes,
                           const CameraIntrinsics& intrinsics, const TrackSimOptions& options,
                           uint64_t seed) {
  TrackTable table;
  const Rng rng(mix_seed(seed, 0x7eac5ull));
  for (int kf = 0; kf < static_cast<int>(keyframes.size()); ++kf) {
    const Pose camera_from_world = keyframes.frames[kf].world_from_camera.inverse();
    const Eigen::Vector3d camera_center = keyframes.frames[kf].world_from_camera.translation();
    int visible = 0;
    for (int a = 0; a < static_cast<int>(scene.anchors.size()); ++a) {
      const Eigen::Vector3d& anchor = scene.anchors[a];
      const Eigen::Vector3d p_cam = camera_from_world * anchor;
      if (p_cam.z() < options.min_depth) {
        continue;
      }
      const auto projected = project(intrinsics, p_cam);
      if (!projected || !intrinsics.in_image(*projected)) {
        continue;
      }
      // Exact occlusion test: nothing may intersect the viewing ray
      // strictly before the anchor.
      const double range = (anchor - camera_center).norm();
      const Eigen::Vector3d dir = (anchor - camera_center) / range;
      const auto hit = scene_ray_intersect(scene.primitives, camera_center, dir);
      if (hit && *hit < range - 1e-6) {
        continue;
      }
      Rng obs_rng = rng.fork((static_cast<uint64_t>(kf) << 24) ^ static_cast<uint64_t>(a));
      Pixel pixel = *projected;
      pixel.level = options.max_level > 0 ? obs_rng.uniform_int(0, options.max_level) : 0;
      const double sigma = options.sigma_px * pixel_sigma(pixel.level);
      if (sigma > 0.0) {
        pixel.u += clamped_gaussian(obs_rng, sigma, 6.0 * sigma);
        pixel.v += clamped_gaussian(obs_rng, sigma, 6.0 * sigma);
      }
      if (!intrinsics.in_image(pixel)) {
        continue;
      }
      table.add(TrackObservation{a, kf, pixel});
      ++visible;
    }
    if (visible < options.min_features_per_frame) {
      throw NoVisibleFeaturesError("generate_tracks: keyframe " + std::to_string(kf) + " sees " +
                                   std::to_string(visible) + " anchors (need " +
                                   std::to_string(options.min_features_per_frame) + ")");
    }
  }
  return table;
}

std::vector<std::pair<int, Eigen::Vector3d>> camera_frame_structure(
    const SyntheticScene& scene, const Trajectory& keyframes, const TrackTable& table,
    int keyframe, double structure_sigma, double structure_scale, uint64_t seed) {
  std::vector<std::pair<int, Eigen::Vector3d>> out;
  const Pose camera_from_world = keyframes.frames[keyframe].world_from_camera.inverse();
  Rng rng(mix_seed(seed, 0x10ca1u ^ static_cast<uint64_t>(keyframe)));
  for (const size_t index : table.of_keyframe(keyframe)) {
    const TrackObservation& obs = table.observations()[index];
    Eigen::Vector3d p_cam = structure_scale * (camera_from_world * scene.anchors[obs.anchor]);
    if (structure_sigma > 0.0) {
      p_cam += rng.gaussian_vector(structure_sigma);
    }
    out.emplace_back(obs.anchor, p_cam);
  }
  return out;
}

}  // namespace sdfloc::sim
