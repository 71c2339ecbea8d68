// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sdfloc/sim/trajectory.hpp"

namespace sdfloc::sim {

/// Random-walk drift injected into the relative motion between frames,
/// plus an optional global scale corruption of the translations (monocular
/// scale error). scale 1 and zero sigmas leave the trajectory untouched.
struct OdometryNoiseModel {
  double sigma_translation = 0.0;  // meters per frame
  double sigma_rotation = 0.0;     // radians per frame
  double scale = 1.0;              // > 0

  bool is_identity() const {
    return sigma_translation == 0.0 && sigma_rotation == 0.0 && scale == 1.0;
  }
};

/// Applies the noise model to each inter-frame delta and re-chains the
/// poses. Scaling every relative translation by `scale` scales the whole
/// trajectory about the first camera center while keeping rotations. The
/// first frame is returned unchanged. Deterministic per seed.
Trajectory corrupt_odometry(const Trajectory& trajectory, const OdometryNoiseModel& noise,
                            uint64_t seed);

}  // namespace sdfloc::sim
