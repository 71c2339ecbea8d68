// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// SE(3) rigid transforms and se(3) twists with a left-multiplicative
// update convention. Twist coordinates are ordered (rho, phi):
// translational part first, rotational part second.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sdfloc {

/// se(3) tangent vector. rho is the translational part (meters), phi the
/// rotational part (radians, axis * angle).
struct Twist {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();
  Eigen::Vector3d phi = Eigen::Vector3d::Zero();

  Twist() = default;
  Twist(const Eigen::Vector3d& rho_in, const Eigen::Vector3d& phi_in)
      : rho(rho_in), phi(phi_in) {}

  /// Packs as a 6-vector [rho; phi].
  Eigen::Matrix<double, 6, 1> vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << rho, phi;
    return v;
  }

  static Twist from_vector(const Eigen::Matrix<double, 6, 1>& v) {
    return Twist(v.head<3>(), v.tail<3>());
  }

  double norm() const { return vector().norm(); }
};

/// Skew-symmetric matrix such that skew(a) * b = a x b.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Rigid transform in SE(3). Rotation stays orthonormal under arbitrarily
/// long composition chains: every 100 compositions the rotation is snapped
/// back to the nearest orthonormal matrix (polar decomposition).
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return Pose(); }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  /// R * p + t.
  Eigen::Vector3d transform(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return transform(p); }

  /// this o other, i.e. (this * other)(p) = this(other(p)).
  Pose compose(const Pose& other) const;
  Pose operator*(const Pose& other) const { return compose(other); }

  Pose inverse() const;

  Eigen::Matrix4d matrix() const;

  /// Largest deviation of R^T R from identity; drift diagnostic.
  double orthonormality_error() const;

  /// Nearest orthonormal rotation via polar decomposition.
  void reorthonormalize();

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
  // Compositions since the rotation was last known orthonormal to machine
  // precision. Composition renormalizes once this reaches 100.
  int compositions_since_renorm_ = 0;
};

/// Exponential map se(3) -> SE(3). Total; switches to a Taylor branch for
/// ||phi|| < 1e-6 so the zero twist maps exactly to identity.
Pose exp_twist(const Twist& xi);

/// Left-multiplicative update: exp(xi^) * T.
Pose apply_twist(const Twist& xi, const Pose& pose);

/// Logarithm map SE(3) -> se(3). Throws AngleAtPiError when the rotation
/// angle is within 1e-9 of pi, where the axis is not unique.
Twist log_pose(const Pose& pose);

/// Rotation angle of the pose in radians, in [0, pi].
double rotation_angle(const Pose& pose);

/// p = T * q for the source-frame point q: derivative of exp(xi^) * (T*q)
/// with respect to xi at xi = 0, in (rho, phi) ordering:  [I3 | -(T*q)^].
Eigen::Matrix<double, 3, 6> pose_point_jacobian(const Pose& pose, const Eigen::Vector3d& point);

}  // namespace sdfloc
