// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/joint_optimizer.hpp"

#include <cmath>

#include <doctest.h>

#include "sdfloc/errors.hpp"
#include "sdfloc/map/map_builder.hpp"
#include "sdfloc/sim/random.hpp"
#include "synthetic_problem.hpp"

using namespace sdfloc;
using test::make_synthetic_problem;
using test::SyntheticProblem;
using test::SyntheticProblemOptions;

namespace {

SolverConfig joint_config(int max_iterations = 100) {
  SolverConfig config;
  config.max_iterations = max_iterations;
  config.energy_tol = 1e-10;
  return config;
}

double mean_pose_error(const SyntheticProblem& sp) {
  double sum = 0.0;
  for (size_t k = 0; k < sp.keyframe_ids.size(); ++k) {
    const Pose est = sp.problem->keyframes().at(sp.keyframe_ids[k]).camera_from_world.inverse();
    sum += (est.translation() -
            sp.gt_keyframes.frames[k].world_from_camera.translation())
               .norm();
  }
  return sum / static_cast<double>(sp.keyframe_ids.size());
}

double recovered_interframe_scale(const SyntheticProblem& sp) {
  double est = 0.0, ref = 0.0;
  for (size_t k = 1; k < sp.keyframe_ids.size(); ++k) {
    const Eigen::Vector3d c_prev =
        sp.problem->keyframes().at(sp.keyframe_ids[k - 1]).camera_from_world.inverse().translation();
    const Eigen::Vector3d c_cur =
        sp.problem->keyframes().at(sp.keyframe_ids[k]).camera_from_world.inverse().translation();
    est += (c_cur - c_prev).norm();
    ref += (sp.gt_keyframes.frames[k].world_from_camera.translation() -
            sp.gt_keyframes.frames[k - 1].world_from_camera.translation())
               .norm();
  }
  return est / ref;
}

// Plane-floor toy problem whose interpolated field is exact: at ground
// truth every residual is identically zero.
struct ToyProblem {
  std::unique_ptr<SdfMap> map;
  std::unique_ptr<Problem> problem;
};

ToyProblem make_exact_toy_problem() {
  ToyProblem toy;
  MapBuildOptions options;
  options.voxel_size = 0.1;
  options.truncation_distance = 2.0;
  MapBounds bounds;
  bounds.min = Eigen::Vector3d(-4, -4, -1.0);
  bounds.max = Eigen::Vector3d(4, 4, 1.0);
  toy.map = build_from_analytic({Plane{{0, 0, 1}, 0.0}}, bounds, options);
  toy.problem = std::make_unique<Problem>(toy.map.get(), test::synthetic_camera(), 1.0);

  sim::Rng rng(211);
  std::vector<Pose> cams;
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix3d r_wc;
    r_wc.col(0) = Eigen::Vector3d::UnitX();
    r_wc.col(1) = -Eigen::Vector3d::UnitY();
    r_wc.col(2) = -Eigen::Vector3d::UnitZ();
    const Pose world_from_camera(r_wc, Eigen::Vector3d(0.5 * k, 0.1 * k, 2.0));
    cams.push_back(world_from_camera.inverse());
    toy.problem->add_keyframe(cams.back(), k == 0);
  }
  for (int l = 0; l < 12; ++l) {
    const Eigen::Vector3d p(rng.uniform(-0.8, 1.6), rng.uniform(-0.8, 0.8), 0.0);
    const LandmarkId lm = toy.problem->add_landmark(p, LandmarkSet::kMapConstrained);
    for (int k = 0; k < 3; ++k) {
      const auto px = project(test::synthetic_camera(), cams[k] * p);
      REQUIRE(px.has_value());
      toy.problem->add_observation(lm, k, *px);
    }
  }
  return toy;
}

}  // namespace

TEST_CASE("joint_optimize: zero-noise problem at ground truth converges immediately") {
  ToyProblem toy = make_exact_toy_problem();
  const JointReport report = joint_optimize(*toy.problem, joint_config());
  CHECK(report.round1.final_energy <= 1e-10);
  CHECK(report.round1.iterations <= 2);
  CHECK(report.outliers_removed == 0);
  CHECK(report.sdf_factors_deactivated == 0);
}

TEST_CASE("joint_optimize: accepted energies are monotone in both rounds") {
  SyntheticProblemOptions options;
  options.sigma_px = 0.5;
  options.landmark_init_sigma = 0.05;
  options.seed = 3;
  SyntheticProblem sp = make_synthetic_problem(options);
  const JointReport report = joint_optimize(*sp.problem, joint_config());
  for (const SolveReport* round : {&report.round1, &report.round2}) {
    REQUIRE(!round->accepted_energies.empty());
    for (size_t i = 1; i < round->accepted_energies.size(); ++i) {
      CHECK(round->accepted_energies[i] <= round->accepted_energies[i - 1] + 1e-12);
    }
    CHECK(round->final_energy <= round->initial_energy + 1e-12);
  }
}

TEST_CASE("joint_optimize: recovers a global scale corruption of 0.8 within 1%") {
  SyntheticProblemOptions options;
  options.scale_corruption = 0.8;
  options.num_keyframes = 8;
  options.seed = 5;
  SyntheticProblem sp = make_synthetic_problem(options);
  const SolverConfig config = joint_config(200);
  joint_optimize(*sp.problem, config);
  const double scale = recovered_interframe_scale(sp);
  MESSAGE("recovered scale ", scale);
  CHECK(std::abs(scale - 1.0) <= 0.01);
  CHECK(mean_pose_error(sp) < 0.05);
}

TEST_CASE("joint_optimize: planted 20 px outliers are excluded, pose error stays clean") {
  SyntheticProblemOptions clean_options;
  clean_options.sigma_px = 0.4;
  clean_options.landmark_init_sigma = 0.03;
  clean_options.seed = 7;
  SyntheticProblem clean = make_synthetic_problem(clean_options);
  joint_optimize(*clean.problem, joint_config());
  const double clean_error = mean_pose_error(clean);

  SyntheticProblemOptions options = clean_options;
  options.fraction_pixel_outliers = 0.10;
  SyntheticProblem sp = make_synthetic_problem(options);
  REQUIRE(sp.planted_outliers.size() > 0);
  const JointReport report = joint_optimize(*sp.problem, joint_config());

  int detected = 0;
  for (const LandmarkId id : report.outlier_landmarks) {
    detected += sp.planted_outliers.count(id) > 0 ? 1 : 0;
  }
  const double recall =
      static_cast<double>(detected) / static_cast<double>(sp.planted_outliers.size());
  const double precision = report.outlier_landmarks.empty()
                               ? 1.0
                               : static_cast<double>(detected) /
                                     static_cast<double>(report.outlier_landmarks.size());
  MESSAGE("outlier recall ", recall, " precision ", precision);
  CHECK(recall >= 0.9);
  CHECK(precision >= 0.9);
  CHECK(mean_pose_error(sp) <= 2.0 * clean_error + 1e-4);
}

TEST_CASE("joint_optimize: map-inconsistent landmarks lose their SDF factor, not their life") {
  SyntheticProblemOptions options;
  options.sigma_px = 0.3;
  options.fraction_map_inconsistent = 0.05;
  options.seed = 11;
  SyntheticProblem sp = make_synthetic_problem(options);
  REQUIRE(sp.map_inconsistent.size() > 0);
  const JointReport report = joint_optimize(*sp.problem, joint_config());

  for (const LandmarkId id : sp.map_inconsistent) {
    // Survives as a landmark (tolerant occlusion), SDF factor retired.
    CHECK(sp.problem->landmarks().count(id) == 1);
    const auto it = sp.problem->sdf_factors().find(id);
    const bool factor_gone = it == sp.problem->sdf_factors().end() || !it->second.active;
    CHECK(factor_gone);
  }
}

TEST_CASE("joint_optimize: idempotence at the optimum") {
  SyntheticProblemOptions options;
  options.sigma_px = 0.4;
  options.seed = 13;
  SyntheticProblem sp = make_synthetic_problem(options);
  const SolverConfig config = joint_config();
  const JointReport first = joint_optimize(*sp.problem, config);
  const JointReport second = joint_optimize(*sp.problem, config);
  CHECK(std::abs(second.round2.final_energy - first.round2.final_energy) <=
        1e-6 * std::max(1.0, first.round2.final_energy));
}

TEST_CASE("joint_optimize: gauge handling") {
  ToyProblem toy = make_exact_toy_problem();

  SUBCASE("sdf_anchored is accepted with SDF factors present") {
    SolverConfig config = joint_config();
    config.gauge = GaugeMode::kSdfAnchored;
    for (auto& [id, kf] : toy.problem->keyframes()) {
      kf.fixed = false;
    }
    CHECK_NOTHROW(joint_optimize(*toy.problem, config));
  }

  SUBCASE("sdf_anchored without factors or fixed keyframes is gauge-unfixed") {
    SolverConfig config = joint_config();
    config.gauge = GaugeMode::kSdfAnchored;
    for (auto& [id, kf] : toy.problem->keyframes()) {
      kf.fixed = false;
    }
    std::vector<LandmarkId> ids;
    for (const auto& [id, factor] : toy.problem->sdf_factors()) {
      ids.push_back(id);
    }
    for (const LandmarkId id : ids) {
      toy.problem->migrate_to_vision_only(id);
    }
    CHECK_THROWS_AS(joint_optimize(*toy.problem, config), GaugeUnfixedError);
  }

  SUBCASE("fewer than two keyframes is degenerate") {
    Problem problem(toy.map.get(), test::synthetic_camera(), 1.0);
    problem.add_keyframe(Pose{}, true);
    CHECK_THROWS_AS(joint_optimize(problem, joint_config()), DegenerateProblemError);
  }
}

TEST_CASE("joint_optimize: SDF factors pull a rigidly disturbed run back to the map frame") {
  SyntheticProblemOptions options;
  options.seed = 17;
  options.sigma_px = 0.2;
  SyntheticProblem reference = make_synthetic_problem(options);
  joint_optimize(*reference.problem, joint_config(150));
  const double reference_error = mean_pose_error(reference);

  // Same problem, all free poses and landmarks rigidly moved: with lambda
  // > 0 the map anchors the frame, so the solution returns.
  SyntheticProblem moved = make_synthetic_problem(options);
  const Pose g = exp_twist(Twist({0.12, -0.08, 0.06}, {0.02, 0.03, -0.02}));
  for (auto& [id, kf] : moved.problem->keyframes()) {
    kf.camera_from_world = kf.camera_from_world * g.inverse();
  }
  for (auto& [id, lm] : moved.problem->landmarks()) {
    lm.position = g * lm.position;
  }
  joint_optimize(*moved.problem, joint_config(150));
  CHECK(mean_pose_error(moved) < std::max(5.0 * reference_error, 0.02));
}

TEST_CASE("gauge freedom with lambda = 0: congruent solutions from congruent starts") {
  // One fixed keyframe, no SDF coupling: a small disturbance of the free
  // parameters must fall back to the same residual level.
  ToyProblem toy = make_exact_toy_problem();
  SolverConfig config = joint_config(150);
  config.lambda = 0.0;
  toy.problem->set_coupling_lambda(0.0);

  sim::Rng rng(219);
  Problem disturbed = *toy.problem;
  bool first = true;
  for (auto& [id, kf] : disturbed.keyframes()) {
    if (first) {
      first = false;  // keyframe 0 stays fixed
      continue;
    }
    kf.camera_from_world =
        apply_twist(Twist(rng.gaussian_vector(0.01), rng.gaussian_vector(0.005)),
                    kf.camera_from_world);
  }
  for (auto& [id, lm] : disturbed.landmarks()) {
    lm.position += rng.gaussian_vector(0.01);
  }

  const JointReport base = joint_optimize(*toy.problem, config);
  const JointReport moved = joint_optimize(disturbed, config);
  CHECK(std::abs(base.round2.final_energy - moved.round2.final_energy) <= 1e-8);
}

TEST_CASE("energy decomposition: total equals repro + lambda * sdf, any order") {
  SyntheticProblemOptions options;
  options.sigma_px = 0.6;
  options.landmark_init_sigma = 0.04;
  options.seed = 19;
  SyntheticProblem sp = make_synthetic_problem(options);
  sp.problem->set_coupling_lambda(1.7);
  const RobustLoss loss{1.345};
  const EnergyBreakdown breakdown = problem_energy(*sp.problem, loss);
  CHECK(breakdown.total ==
        doctest::Approx(breakdown.repro + 1.7 * breakdown.sdf).epsilon(1e-12));

  // Compensated (Kahan) summation oracle over per-factor energies.
  double sum = 0.0, compensation = 0.0;
  const auto add = [&](double term) {
    const double y = term - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  };
  for (const ReprojectionFactor& f : sp.problem->reprojection_factors()) {
    if (!f.active) {
      continue;
    }
    const auto residual = reprojection_residual(
        sp.problem->intrinsics(), sp.problem->keyframes().at(f.keyframe).camera_from_world,
        sp.problem->landmarks().at(f.landmark).position, f.measured);
    if (residual) {
      add(loss.energy(std::sqrt(f.weight) * residual->norm()));
    }
  }
  for (const auto& [id, factor] : sp.problem->sdf_factors()) {
    if (!factor.active) {
      continue;
    }
    const auto residual =
        sdf_residual(*sp.problem->map(), sp.problem->landmarks().at(id).position);
    if (residual) {
      add(1.7 * loss.energy(std::sqrt(factor.weight) * std::abs(*residual)));
    }
  }
  CHECK(std::abs(breakdown.total - sum) <= 1e-10 * std::max(1.0, sum));
}

TEST_CASE("deactivating an SDF factor removes exactly its energy contribution") {
  SyntheticProblemOptions options;
  options.landmark_init_sigma = 0.05;
  options.seed = 23;
  SyntheticProblem sp = make_synthetic_problem(options);
  const RobustLoss loss{1.345};
  const double lambda = sp.problem->coupling_lambda();

  const LandmarkId victim = sp.problem->sdf_factors().begin()->first;
  const auto residual =
      sdf_residual(*sp.problem->map(), sp.problem->landmarks().at(victim).position);
  REQUIRE(residual.has_value());
  const double contribution =
      lambda *
      loss.energy(std::sqrt(sp.problem->sdf_factors().at(victim).weight) * std::abs(*residual));

  const double before = problem_energy(*sp.problem, loss).total;
  sp.problem->sdf_factors().at(victim).active = false;
  const double after = problem_energy(*sp.problem, loss).total;
  CHECK(before - after == doctest::Approx(contribution).epsilon(1e-12));
}

TEST_CASE("classify_outliers: the two-threshold decision table") {
  // Plane-floor map with sigma_sdf = 0.1: a landmark at z = 0.1 * sqrt(x)
  // has whitened squared SDF residual exactly x (the plane field is
  // interpolation-exact).
  MapBuildOptions map_options;
  map_options.voxel_size = 0.1;
  map_options.truncation_distance = 2.0;
  map_options.sigma_sdf = 0.1;
  MapBounds bounds;
  bounds.min = Eigen::Vector3d(-4, -4, -1.0);
  bounds.max = Eigen::Vector3d(4, 4, 1.0);
  const auto map = build_from_analytic({Plane{{0, 0, 1}, 0.0}}, bounds, map_options);
  const CameraIntrinsics cam = test::synthetic_camera();
  const SolverConfig config;  // th_sdf 3.841, th_repro 5.991

  struct Case {
    const char* name;
    bool in_map_set;
    bool sdf_pre_deactivated;
    double sdf_chi2;    // target whitened squared SDF residual
    double repro_chi2;  // target whitened squared reprojection residual
    bool expect_deactivated;
    bool expect_outlier;
  };
  const Case cases[] = {
      {"all residuals zero", true, false, 0.0, 0.0, false, false},
      {"sdf and repro just below", true, false, 3.840, 5.990, false, false},
      {"sdf just above: deactivate only", true, false, 3.842, 5.990, true, false},
      {"sdf above with huge repro: amnesty this pass", true, false, 3.842, 100.0, true, false},
      {"pre-deactivated, repro just above: outlier", true, true, 0.0, 5.992, false, true},
      {"pre-deactivated, repro just below: inlier", true, true, 0.0, 5.990, false, false},
      {"sdf fine, repro above: outlier", true, false, 3.840, 5.992, false, true},
      {"vision-only, repro above: outlier", false, false, 0.0, 5.992, false, true},
      {"vision-only, repro below: inlier", false, false, 0.0, 5.990, false, false},
  };

  for (const Case& c : cases) {
    CAPTURE(c.name);
    Problem problem(map.get(), cam, 1.0);
    Eigen::Matrix3d r_wc;
    r_wc.col(0) = Eigen::Vector3d::UnitX();
    r_wc.col(1) = -Eigen::Vector3d::UnitY();
    r_wc.col(2) = -Eigen::Vector3d::UnitZ();
    const Pose camera_from_world = Pose(r_wc, Eigen::Vector3d(0, 0, 2.0)).inverse();
    const KeyframeId kf = problem.add_keyframe(camera_from_world, true);

    // Height picks the SDF chi2; the pixel offset picks the repro chi2.
    const double z = 0.1 * std::sqrt(c.sdf_chi2);
    const Eigen::Vector3d position(0.2, -0.1, z);
    const LandmarkId lm = problem.add_landmark(
        position, c.in_map_set ? LandmarkSet::kMapConstrained : LandmarkSet::kVisionOnly);
    const auto px = project(cam, camera_from_world * position);
    REQUIRE(px.has_value());
    problem.add_observation(lm, kf, Pixel(px->u + std::sqrt(c.repro_chi2), px->v));
    if (c.sdf_pre_deactivated) {
      problem.sdf_factors().at(lm).active = false;
    }

    const OutlierClassification result = classify_outliers(problem, config);
    const bool deactivated = std::count(result.deactivated_sdf.begin(),
                                        result.deactivated_sdf.end(), lm) > 0;
    const bool outlier =
        std::count(result.outliers.begin(), result.outliers.end(), lm) > 0;
    CHECK(deactivated == c.expect_deactivated);
    CHECK(outlier == c.expect_outlier);
  }
}
