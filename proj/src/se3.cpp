// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/geometry/se3.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "sdfloc/errors.hpp"

namespace sdfloc {
namespace {

constexpr double kSmallAngle = 1e-6;  // Taylor branch threshold on ||phi||
constexpr int kRenormInterval = 100;

// V(phi) from the closed-form se(3) exponential: t = V * rho.
Eigen::Matrix3d left_jacobian_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d hat = skew(phi);
  if (theta < kSmallAngle) {
    // I + hat/2 + hat^2/6; truncation error O(theta^3) < 1e-18.
    return Eigen::Matrix3d::Identity() + 0.5 * hat + hat * hat / 6.0;
  }
  const double theta_sq = theta * theta;
  const double a = (1.0 - std::cos(theta)) / theta_sq;
  const double b = (theta - std::sin(theta)) / (theta_sq * theta);
  return Eigen::Matrix3d::Identity() + a * hat + b * hat * hat;
}

Eigen::Matrix3d left_jacobian_inverse_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d hat = skew(phi);
  double c;
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * hat + c * hat * hat;
}

}  // namespace

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return s;
}

Pose Pose::compose(const Pose& other) const {
  Pose out(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
  out.compositions_since_renorm_ =
      compositions_since_renorm_ + other.compositions_since_renorm_ + 1;
  if (out.compositions_since_renorm_ >= kRenormInterval) {
    out.reorthonormalize();
  }
  return out;
}

Pose Pose::inverse() const {
  Pose out(rotation_.transpose(), -(rotation_.transpose() * translation_));
  out.compositions_since_renorm_ = compositions_since_renorm_;
  return out;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

double Pose::orthonormality_error() const {
  return (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity())
      .cwiseAbs()
      .maxCoeff();
}

void Pose::reorthonormalize() {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  rotation_ = r;
  compositions_since_renorm_ = 0;
}

Pose exp_twist(const Twist& xi) {
  const double theta = xi.phi.norm();
  Eigen::Matrix3d rotation;
  if (theta < kSmallAngle) {
    const Eigen::Matrix3d hat = skew(xi.phi);
    rotation = Eigen::Matrix3d::Identity() + hat + 0.5 * hat * hat;
  } else {
    rotation = Eigen::AngleAxisd(theta, xi.phi / theta).toRotationMatrix();
  }
  return Pose(rotation, left_jacobian_so3(xi.phi) * xi.rho);
}

Pose apply_twist(const Twist& xi, const Pose& pose) {
  return exp_twist(xi).compose(pose);
}

Twist log_pose(const Pose& pose) {
  // Quaternion-based SO(3) log; well conditioned for all angles below pi.
  Eigen::Quaterniond q(pose.rotation());
  q.normalize();
  if (q.w() < 0) {
    q.coeffs() *= -1.0;
  }
  const double vec_norm = q.vec().norm();
  const double theta = 2.0 * std::atan2(vec_norm, q.w());
  if (std::abs(theta - M_PI) <= 1e-9) {
    throw AngleAtPiError("log_pose: rotation angle within 1e-9 of pi");
  }
  Eigen::Vector3d phi;
  if (vec_norm < 1e-9) {
    phi = 2.0 * q.vec() / q.w();
  } else {
    phi = (theta / vec_norm) * q.vec();
  }
  return Twist(left_jacobian_inverse_so3(phi) * pose.translation(), phi);
}

double rotation_angle(const Pose& pose) {
  Eigen::Quaterniond q(pose.rotation());
  q.normalize();
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

Eigen::Matrix<double, 3, 6> pose_point_jacobian(const Pose& pose, const Eigen::Vector3d& point) {
  Eigen::Matrix<double, 3, 6> j;
  j.leftCols<3>() = Eigen::Matrix3d::Identity();
  j.rightCols<3>() = -skew(pose.transform(point));
  return j;
}

}  // namespace sdfloc
