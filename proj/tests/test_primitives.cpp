// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/map/primitives.hpp"

#include <doctest.h>

#include "sdfloc/errors.hpp"
#include "sdfloc/sim/random.hpp"

using namespace sdfloc;

TEST_CASE("sphere / box / plane signed distances") {
  const Primitive sphere = Sphere{{0, 0, 0}, 1.0};
  CHECK(signed_distance(sphere, {2, 0, 0}) == doctest::Approx(1.0));
  CHECK(signed_distance(sphere, {0, 0, 0}) == doctest::Approx(-1.0));

  const Primitive box = Box{{0, 0, 0}, {2.0, 2.0, 2.0}};
  CHECK(signed_distance(box, {2, 0, 0}) == doctest::Approx(1.0));
  CHECK(signed_distance(box, {0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(signed_distance(box, {2, 2, 0}) == doctest::Approx(std::sqrt(2.0)));

  const Primitive plane = Plane{{0, 0, 1}, 0.5};
  CHECK(signed_distance(plane, {3, -2, 2.0}) == doctest::Approx(1.5));
  CHECK(signed_distance(plane, {0, 0, -1.0}) == doctest::Approx(-1.5));
}

TEST_CASE("union of two overlapping spheres is the min") {
  const std::vector<Primitive> scene = {Sphere{{0, 0, 0}, 1.0}, Sphere{{1.0, 0, 0}, 1.0}};
  sim::Rng rng(47);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d p = rng.gaussian_vector(1.5);
    const double expected =
        std::min(signed_distance(scene[0], p), signed_distance(scene[1], p));
    CHECK(scene_signed_distance(scene, p) == expected);
  }
}

TEST_CASE("ray intersections match the SDF zero") {
  sim::Rng rng(53);
  const std::vector<Primitive> prims = {Sphere{{0.5, -0.2, 0.3}, 0.7},
                                        Box{{-1.0, 0.8, 0.0}, {1.2, 0.6, 0.9}},
                                        Plane{{0, 0, 1}, -1.0}};
  for (int i = 0; i < 300; ++i) {
    const Eigen::Vector3d origin = rng.gaussian_vector(2.0) + Eigen::Vector3d(0, 0, 2.0);
    const Eigen::Vector3d dir = rng.unit_vector();
    const auto t = scene_ray_intersect(prims, origin, dir);
    if (!t) {
      continue;
    }
    if (scene_signed_distance(prims, origin) > 0.0) {
      // First hit from outside lies on the isosurface.
      CHECK(std::abs(scene_signed_distance(prims, origin + *t * dir)) < 1e-9);
      // Nothing closer: marching to just before the hit stays outside.
      CHECK(scene_signed_distance(prims, origin + 0.9 * *t * dir) > 0.0);
    }
  }
}

TEST_CASE("scene text parsing round trip and errors") {
  const std::string text =
      "# a comment\n"
      "sphere 0 0 0 1.0\n"
      "box 1 2 3 0.5 0.5 0.5  # trailing comment\n"
      "plane 0 0 2 1.0\n";
  const auto prims = parse_scene_text(text);
  REQUIRE(prims.size() == 3);
  // Plane normal normalized (and offset rescaled with it).
  const auto* plane = std::get_if<Plane>(&prims[2]);
  REQUIRE(plane != nullptr);
  CHECK(plane->normal.norm() == doctest::Approx(1.0));
  CHECK(plane->offset == doctest::Approx(0.5));

  CHECK_THROWS_AS(parse_scene_text("cylinder 0 0 0 1"), IoError);
  CHECK_THROWS_AS(parse_scene_text("sphere 0 0 1"), IoError);
  CHECK_THROWS_AS(parse_scene_text("sphere 0 0 0 -1"), IoError);
  CHECK_THROWS_AS(parse_scene_text("plane 0 0 0 1"), IoError);
}
