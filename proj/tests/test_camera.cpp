// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/geometry/camera.hpp"

#include <doctest.h>

#include "sdfloc/errors.hpp"
#include "sdfloc/sim/random.hpp"

using namespace sdfloc;

namespace {
CameraIntrinsics test_camera() { return CameraIntrinsics(100.0, 100.0, 50.0, 50.0, 100, 100); }
}  // namespace

TEST_CASE("intrinsics validation") {
  CHECK_THROWS_AS(CameraIntrinsics(0.0, 100, 50, 50, 100, 100), ConfigError);
  CHECK_THROWS_AS(CameraIntrinsics(100, 100, 120, 50, 100, 100), ConfigError);
  CHECK_THROWS_AS(CameraIntrinsics(100, 100, 50, -1, 100, 100), ConfigError);
}

TEST_CASE("project: optical axis, closed form, behind camera") {
  const CameraIntrinsics k = test_camera();

  const auto center = project(k, {0.0, 0.0, 2.5});
  REQUIRE(center.has_value());
  CHECK(center->u == doctest::Approx(50.0));
  CHECK(center->v == doctest::Approx(50.0));

  const auto px = project(k, {1.0, 0.0, 1.0});
  REQUIRE(px.has_value());
  CHECK(px->u == doctest::Approx(150.0));
  CHECK(px->v == doctest::Approx(50.0));

  CHECK(!project(k, {0.2, 0.1, 0.0}).has_value());
  CHECK(!project(k, {0.2, 0.1, -1.0}).has_value());
  CHECK(!project_jacobian(k, {0.2, 0.1, 0.0}).has_value());
}

TEST_CASE("project_jacobian: finite differences on 100 random points") {
  const CameraIntrinsics k = test_camera();
  sim::Rng rng(41);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(0.5, 5.0));
    const auto jac = project_jacobian(k, p);
    REQUIRE(jac.has_value());
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::Vector3d dp = Eigen::Vector3d::Zero();
      dp[axis] = h;
      const auto plus = project(k, p + dp);
      const auto minus = project(k, p - dp);
      REQUIRE(plus.has_value());
      REQUIRE(minus.has_value());
      const Eigen::Vector2d fd = (plus->uv() - minus->uv()) / (2 * h);
      const double scale = std::max(1.0, fd.norm());
      CHECK((fd - jac->col(axis)).norm() / scale < 1e-6);
    }
  }
}

TEST_CASE("project_jacobian: axis symmetry and 1/z homogeneity") {
  const CameraIntrinsics k = test_camera();

  const auto on_axis = project_jacobian(k, {0.0, 0.0, 3.0});
  REQUIRE(on_axis.has_value());
  CHECK((*on_axis)(0, 1) == 0.0);  // du/dy
  CHECK((*on_axis)(1, 0) == 0.0);  // dv/dx

  const Eigen::Vector3d p(0.4, -0.2, 2.0);
  const double s = 1.7;
  const auto j1 = project_jacobian(k, p);
  const auto j2 = project_jacobian(k, s * p);
  REQUIRE(j1.has_value());
  REQUIRE(j2.has_value());
  CHECK((*j2 - *j1 / s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unproject_ray inverts project") {
  const CameraIntrinsics k = test_camera();
  sim::Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d p(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(0.5, 4.0));
    const auto px = project(k, p);
    REQUIRE(px.has_value());
    const Eigen::Vector3d ray = unproject_ray(k, *px);
    CHECK((ray.normalized() - p.normalized()).norm() < 1e-12);
  }
}
