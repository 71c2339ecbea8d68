// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Damped Gauss-Newton normal equations with the bundle-adjustment block
// structure: 6x6 pose blocks, 3x3 landmark blocks, 6x3 couplings from
// reprojection factors. Solved by eliminating the landmark blocks (Schur
// complement) and factorizing the reduced pose system.

#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

namespace sdfloc {

class BlockSystem {
 public:
  BlockSystem(int num_pose_blocks, int num_landmark_blocks);

  int num_pose_blocks() const { return static_cast<int>(pose_h_.size()); }
  int num_landmark_blocks() const { return static_cast<int>(landmark_h_.size()); }
  int dimension() const { return 6 * num_pose_blocks() + 3 * num_landmark_blocks(); }

  void add_pose_block(int pose, const Eigen::Matrix<double, 6, 6>& h,
                      const Eigen::Matrix<double, 6, 1>& b);
  void add_landmark_block(int landmark, const Eigen::Matrix3d& h, const Eigen::Vector3d& b);
  void add_coupling(int pose, int landmark, const Eigen::Matrix<double, 6, 3>& w);

  struct Step {
    bool valid = false;
    Eigen::VectorXd pose;      // 6 per pose block
    Eigen::VectorXd landmark;  // 3 per landmark block
    double predicted_decrease = 0.0;
    double squared_norm() const { return pose.squaredNorm() + landmark.squaredNorm(); }
  };

  /// Solves (H + beta I) step = b via the Schur complement over landmarks.
  /// valid is false when the reduced system fails to factorize or produces
  /// non-finite values (numerically singular despite damping).
  Step solve(double beta) const;

  /// Full (H + beta I) and b, for comparing against a dense factorization.
  Eigen::MatrixXd dense_hessian(double beta) const;
  Eigen::VectorXd dense_rhs() const;

 private:
  std::vector<Eigen::Matrix<double, 6, 6>> pose_h_;
  std::vector<Eigen::Matrix<double, 6, 1>> pose_b_;
  std::vector<Eigen::Matrix3d> landmark_h_;
  std::vector<Eigen::Vector3d> landmark_b_;
  // couplings_[landmark]: pose index -> accumulated 6x3 block.
  std::vector<std::map<int, Eigen::Matrix<double, 6, 3>>> couplings_;
};

}  // namespace sdfloc
