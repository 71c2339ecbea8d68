// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/pipeline/evaluation.hpp"

#include <cmath>

#include <doctest.h>

#include "sdfloc/errors.hpp"
#include "sdfloc/sim/random.hpp"
#include "sdfloc/sim/trajectory.hpp"

using namespace sdfloc;
using namespace sdfloc::eval;
using sdfloc::sim::Trajectory;
using sdfloc::sim::TrajectoryFrame;

namespace {

Trajectory sample_trajectory(int frames = 20) {
  return sim::make_orbit_trajectory({0, 0, 1.0}, 2.0, 0.8, frames, 20.0, 1.0);
}

Trajectory transformed(const Trajectory& input, const Pose& g, double scale = 1.0) {
  Trajectory out = input;
  for (TrajectoryFrame& frame : out.frames) {
    const Pose& t = frame.world_from_camera;
    frame.world_from_camera = Pose(g.rotation() * t.rotation(),
                                   scale * (g.rotation() * t.translation()) + g.translation());
  }
  return out;
}

}  // namespace

TEST_CASE("compute_ate: identical trajectories score zero") {
  const Trajectory t = sample_trajectory();
  const AteResult ate = compute_ate(t, t, Alignment::kNone);
  CHECK(ate.translation_rmse == 0.0);
  CHECK(ate.rotation_rmse_deg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ate.per_frame.size() == t.size());
}

TEST_CASE("compute_ate: constant offset gives exactly that RMSE in map frame") {
  const Trajectory t = sample_trajectory();
  Trajectory shifted = t;
  for (TrajectoryFrame& frame : shifted.frames) {
    frame.world_from_camera =
        Pose(frame.world_from_camera.rotation(),
             frame.world_from_camera.translation() + Eigen::Vector3d(0.1, 0, 0));
  }
  const AteResult ate = compute_ate(shifted, t, Alignment::kNone);
  CHECK(ate.translation_rmse == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ate.rotation_rmse_deg == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("compute_ate: similarity alignment recovers a random similarity transform") {
  sim::Rng rng(229);
  const Trajectory t = sample_trajectory();
  const Pose g = exp_twist(Twist(rng.gaussian_vector(1.0), 0.7 * rng.unit_vector()));
  const Trajectory moved = transformed(t, g, 1.37);

  CHECK(compute_ate(moved, t, Alignment::kSimilarity).translation_rmse <= 1e-9);
  // Rigid alignment cannot absorb the scale.
  CHECK(compute_ate(moved, t, Alignment::kRigid).translation_rmse > 0.05);
  // Rigid alignment recovers a pure rigid move.
  const Trajectory rigid_moved = transformed(t, g, 1.0);
  CHECK(compute_ate(rigid_moved, t, Alignment::kRigid).translation_rmse <= 1e-9);
  CHECK(compute_ate(rigid_moved, t, Alignment::kRigid).rotation_rmse_deg <= 1e-7);
}

TEST_CASE("compute_ate: association by nearest timestamp within 10 ms") {
  const Trajectory t = sample_trajectory();
  Trajectory offset = t;
  for (TrajectoryFrame& frame : offset.frames) {
    frame.timestamp += 0.004;  // within the association gate
  }
  CHECK_NOTHROW(compute_ate(offset, t, Alignment::kNone));

  for (TrajectoryFrame& frame : offset.frames) {
    frame.timestamp += 10.0;  // far outside
  }
  CHECK_THROWS_AS(compute_ate(offset, t, Alignment::kNone), AssociationFailureError);
}

TEST_CASE("alignment_from_string") {
  CHECK(alignment_from_string("none") == Alignment::kNone);
  CHECK(alignment_from_string("rigid") == Alignment::kRigid);
  CHECK(alignment_from_string("similarity") == Alignment::kSimilarity);
  CHECK_THROWS_AS(alignment_from_string("sim3"), ConfigError);
}

TEST_CASE("structure_rmse: exact surface points score zero, displacement scores itself") {
  const std::vector<Primitive> scene = {Plane{{0, 0, 1}, 0.0}};
  CHECK(structure_rmse({{0.3, 2.0, 0.0}, {-1.0, 0.5, 0.0}}, scene) == 0.0);
  CHECK(structure_rmse({{0.0, 0.0, 0.1}}, scene) == doctest::Approx(0.1).epsilon(1e-12));

  // Mixed: rmse = sqrt(mean of squared distances).
  CHECK(structure_rmse({{0, 0, 0.1}, {0, 0, 0.0}}, scene) ==
        doctest::Approx(std::sqrt(0.01 / 2.0)).epsilon(1e-12));
}

TEST_CASE("structure_rmse_points: nearest-neighbour distances") {
  const std::vector<Eigen::Vector3d> reference = {{0, 0, 0}, {1, 0, 0}};
  CHECK(structure_rmse_points({{0.1, 0, 0}}, reference) == doctest::Approx(0.1));
  CHECK(structure_rmse_points({{0.9, 0, 0}}, reference) == doctest::Approx(0.1));
}

TEST_CASE("interframe_scale measures the trajectory length ratio") {
  const Trajectory t = sample_trajectory();
  Trajectory scaled = t;
  const Eigen::Vector3d c0 = t.frames.front().world_from_camera.translation();
  for (TrajectoryFrame& frame : scaled.frames) {
    frame.world_from_camera =
        Pose(frame.world_from_camera.rotation(),
             c0 + 0.8 * (frame.world_from_camera.translation() - c0));
  }
  CHECK(interframe_scale(scaled, t) == doctest::Approx(0.8).epsilon(1e-12));
}
