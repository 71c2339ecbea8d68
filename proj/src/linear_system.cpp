// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/linear_system.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace sdfloc {

BlockSystem::BlockSystem(int num_pose_blocks, int num_landmark_blocks)
    : pose_h_(num_pose_blocks, Eigen::Matrix<double, 6, 6>::Zero()),
      pose_b_(num_pose_blocks, Eigen::Matrix<double, 6, 1>::Zero()),
      landmark_h_(num_landmark_blocks, Eigen::Matrix3d::Zero()),
      landmark_b_(num_landmark_blocks, Eigen::Vector3d::Zero()),
      couplings_(num_landmark_blocks) {}

void BlockSystem::add_pose_block(int pose, const Eigen::Matrix<double, 6, 6>& h,
                                 const Eigen::Matrix<double, 6, 1>& b) {
  pose_h_[pose] += h;
  pose_b_[pose] += b;
}

void BlockSystem::add_landmark_block(int landmark, const Eigen::Matrix3d& h,
                                     const Eigen::Vector3d& b) {
  landmark_h_[landmark] += h;
  landmark_b_[landmark] += b;
}

void BlockSystem::add_coupling(int pose, int landmark, const Eigen::Matrix<double, 6, 3>& w) {
  auto [it, inserted] = couplings_[landmark].try_emplace(pose, w);
  if (!inserted) {
    it->second += w;
  }
}

BlockSystem::Step BlockSystem::solve(double beta) const {
  const int np = num_pose_blocks();
  const int nl = num_landmark_blocks();
  Step step;
  step.pose.setZero(6 * np);
  step.landmark.setZero(3 * nl);

  // Damped landmark blocks and their inverses.
  std::vector<Eigen::Matrix3d> v_inv(nl);
  std::vector<Eigen::Vector3d> v_inv_b(nl);
  for (int l = 0; l < nl; ++l) {
    const Eigen::Matrix3d v = landmark_h_[l] + beta * Eigen::Matrix3d::Identity();
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(v);
    if (ldlt.info() != Eigen::Success) {
      return step;
    }
    v_inv[l] = ldlt.solve(Eigen::Matrix3d::Identity());
    v_inv_b[l] = v_inv[l] * landmark_b_[l];
  }

  // Reduced pose system S x = r.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(6 * np, 6 * np);
  Eigen::VectorXd r(6 * np);
  for (int j = 0; j < np; ++j) {
    s.block<6, 6>(6 * j, 6 * j) = pose_h_[j] + beta * Eigen::Matrix<double, 6, 6>::Identity();
    r.segment<6>(6 * j) = pose_b_[j];
  }
  for (int l = 0; l < nl; ++l) {
    for (const auto& [j1, w1] : couplings_[l]) {
      const Eigen::Matrix<double, 6, 3> w1_vinv = w1 * v_inv[l];
      r.segment<6>(6 * j1) -= w1 * v_inv_b[l];
      for (const auto& [j2, w2] : couplings_[l]) {
        s.block<6, 6>(6 * j1, 6 * j2) -= w1_vinv * w2.transpose();
      }
    }
  }

  if (np > 0) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    if (ldlt.info() != Eigen::Success) {
      return step;
    }
    step.pose = ldlt.solve(r);
    if (!step.pose.allFinite()) {
      return step;
    }
  }

  // Back-substitution for the landmarks.
  for (int l = 0; l < nl; ++l) {
    Eigen::Vector3d rhs = landmark_b_[l];
    for (const auto& [j, w] : couplings_[l]) {
      rhs -= w.transpose() * step.pose.segment<6>(6 * j);
    }
    step.landmark.segment<3>(3 * l) = v_inv[l] * rhs;
  }
  if (!step.landmark.allFinite()) {
    step.pose.setZero();
    step.landmark.setZero();
    return step;
  }

  // Gauss-Newton model decrease: b^T step + beta ||step||^2.
  double b_dot_step = 0.0;
  for (int j = 0; j < np; ++j) {
    b_dot_step += pose_b_[j].dot(step.pose.segment<6>(6 * j));
  }
  for (int l = 0; l < nl; ++l) {
    b_dot_step += landmark_b_[l].dot(step.landmark.segment<3>(3 * l));
  }
  step.predicted_decrease = b_dot_step + beta * step.squared_norm();
  step.valid = true;
  return step;
}

Eigen::MatrixXd BlockSystem::dense_hessian(double beta) const {
  const int np = num_pose_blocks();
  const int nl = num_landmark_blocks();
  const int n = dimension();
  Eigen::MatrixXd h = beta * Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < np; ++j) {
    h.block<6, 6>(6 * j, 6 * j) += pose_h_[j];
  }
  for (int l = 0; l < nl; ++l) {
    h.block<3, 3>(6 * np + 3 * l, 6 * np + 3 * l) += landmark_h_[l];
    for (const auto& [j, w] : couplings_[l]) {
      h.block<6, 3>(6 * j, 6 * np + 3 * l) += w;
      h.block<3, 6>(6 * np + 3 * l, 6 * j) += w.transpose();
    }
  }
  return h;
}

Eigen::VectorXd BlockSystem::dense_rhs() const {
  const int np = num_pose_blocks();
  const int nl = num_landmark_blocks();
  Eigen::VectorXd b(dimension());
  for (int j = 0; j < np; ++j) {
    b.segment<6>(6 * j) = pose_b_[j];
  }
  for (int l = 0; l < nl; ++l) {
    b.segment<3>(6 * np + 3 * l) = landmark_b_[l];
  }
  return b;
}

}  // namespace sdfloc
