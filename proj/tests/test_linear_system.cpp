// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/linear_system.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

#include "sdfloc/sim/random.hpp"

using namespace sdfloc;

TEST_CASE("near-zero damping gives the Newton step on a 1-D quadratic") {
  // Residual r = x with unit Jacobian on the first pose coordinate:
  // H = e0 e0^T, b = -x e0.
  const double x = 0.7;
  BlockSystem system(1, 0);
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  h(0, 0) = 1.0;
  Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
  b(0) = -x;
  system.add_pose_block(0, h, b);

  const auto step = system.solve(1e-14);
  REQUIRE(step.valid);
  CHECK(step.pose(0) == doctest::Approx(-x).epsilon(1e-10));
  CHECK(step.predicted_decrease > 0.0);
}

TEST_CASE("huge damping degenerates to a scaled gradient step") {
  const double x = 0.7;
  BlockSystem system(1, 0);
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  h(0, 0) = 1.0;
  Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
  b(0) = -x;
  system.add_pose_block(0, h, b);

  const double beta = 1e9;
  const auto step = system.solve(beta);
  REQUIRE(step.valid);
  CHECK(step.pose(0) == doctest::Approx(-x / beta).epsilon(1e-6));
}

TEST_CASE("Schur-complement solution matches a dense factorization oracle") {
  sim::Rng rng(137);
  for (int trial = 0; trial < 20; ++trial) {
    const int num_poses = rng.uniform_int(1, 2);
    const int num_landmarks = rng.uniform_int(1, 12);  // up to 48 variables
    BlockSystem system(num_poses, num_landmarks);

    // Random PSD blocks from synthetic Jacobian rows, coupled like
    // reprojection factors.
    for (int l = 0; l < num_landmarks; ++l) {
      Eigen::Matrix3d v = Eigen::Matrix3d::Zero();
      Eigen::Vector3d bl = Eigen::Vector3d::Zero();
      for (int j = 0; j < num_poses; ++j) {
        Eigen::Matrix<double, 2, 6> j_pose;
        Eigen::Matrix<double, 2, 3> j_point;
        Eigen::Vector2d r;
        for (int c = 0; c < 6; ++c) {
          j_pose(0, c) = rng.gaussian();
          j_pose(1, c) = rng.gaussian();
        }
        for (int c = 0; c < 3; ++c) {
          j_point(0, c) = rng.gaussian();
          j_point(1, c) = rng.gaussian();
        }
        r << rng.gaussian(), rng.gaussian();
        system.add_pose_block(j, j_pose.transpose() * j_pose, -j_pose.transpose() * r);
        v += j_point.transpose() * j_point;
        bl -= j_point.transpose() * r;
        system.add_coupling(j, l, j_pose.transpose() * j_point);
      }
      system.add_landmark_block(l, v, bl);
    }

    const double beta = 1e-3;
    const auto step = system.solve(beta);
    REQUIRE(step.valid);

    const Eigen::MatrixXd h = system.dense_hessian(beta);
    const Eigen::VectorXd b = system.dense_rhs();
    const Eigen::VectorXd dense = h.ldlt().solve(b);

    Eigen::VectorXd ours(system.dimension());
    ours << step.pose, step.landmark;
    CHECK((ours - dense).norm() / std::max(1.0, dense.norm()) < 1e-8);
  }
}

TEST_CASE("landmark-only and pose-only systems solve") {
  BlockSystem lm_only(0, 2);
  lm_only.add_landmark_block(0, 2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d(1, 0, 0));
  lm_only.add_landmark_block(1, 4.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d(0, 2, 0));
  const auto step = lm_only.solve(0.0);
  REQUIRE(step.valid);
  CHECK(step.landmark.segment<3>(0)(0) == doctest::Approx(0.5));
  CHECK(step.landmark.segment<3>(3)(1) == doctest::Approx(0.5));
}
