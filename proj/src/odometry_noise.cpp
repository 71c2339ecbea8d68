// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/sim/odometry_noise.hpp"

#include "sdfloc/errors.hpp"
#include "sdfloc/sim/random.hpp"

namespace sdfloc::sim {

Trajectory corrupt_odometry(const Trajectory& trajectory, const OdometryNoiseModel& noise,
                            uint64_t seed) {
  if (!(noise.scale > 0.0)) {
    throw ConfigError("corrupt_odometry: scale must be positive");
  }
  if (trajectory.empty() || noise.is_identity()) {
    return trajectory;  // exact: no re-chaining round-off
  }
  Trajectory out;
  out.frames.reserve(trajectory.size());
  out.frames.push_back(trajectory.frames.front());

  Rng rng(mix_seed(seed, 0x0d0uLL));
  for (size_t i = 1; i < trajectory.size(); ++i) {
    const Pose delta = trajectory.frames[i - 1].world_from_camera.inverse() *
                       trajectory.frames[i].world_from_camera;
    Pose corrupted_delta(delta.rotation(), noise.scale * delta.translation());
    if (noise.sigma_translation > 0.0 || noise.sigma_rotation > 0.0) {
      const Twist perturbation(rng.gaussian_vector(noise.sigma_translation),
                               rng.gaussian_vector(noise.sigma_rotation));
      corrupted_delta = apply_twist(perturbation, corrupted_delta);
    }
    out.frames.push_back(TrajectoryFrame{
        trajectory.frames[i].timestamp,
        out.frames.back().world_from_camera * corrupted_delta});
  }
  return out;
}

}  // namespace sdfloc::sim
