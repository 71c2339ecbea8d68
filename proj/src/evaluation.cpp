// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/pipeline/evaluation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "sdfloc/errors.hpp"

namespace sdfloc::eval {
namespace {

constexpr double kMaxAssociationGap = 0.010;  // seconds

struct Association {
  std::vector<std::pair<size_t, size_t>> pairs;  // (estimated, ground truth)
};

Association associate(const sim::Trajectory& estimated, const sim::Trajectory& ground_truth) {
  Association assoc;
  size_t gt = 0;
  for (size_t e = 0; e < estimated.size(); ++e) {
    const double ts = estimated.frames[e].timestamp;
    while (gt + 1 < ground_truth.size() &&
           std::abs(ground_truth.frames[gt + 1].timestamp - ts) <=
               std::abs(ground_truth.frames[gt].timestamp - ts)) {
      ++gt;
    }
    if (gt < ground_truth.size() &&
        std::abs(ground_truth.frames[gt].timestamp - ts) <= kMaxAssociationGap) {
      assoc.pairs.emplace_back(e, gt);
    }
  }
  if (assoc.pairs.size() < 2) {
    throw AssociationFailureError("compute_ate: fewer than 2 matching timestamps");
  }
  return assoc;
}

}  // namespace

Alignment alignment_from_string(const std::string& name) {
  if (name == "none") {
    return Alignment::kNone;
  }
  if (name == "rigid") {
    return Alignment::kRigid;
  }
  if (name == "similarity") {
    return Alignment::kSimilarity;
  }
  throw ConfigError("alignment must be none, rigid or similarity: " + name);
}

AteResult compute_ate(const sim::Trajectory& estimated, const sim::Trajectory& ground_truth,
                      Alignment alignment) {
  const Association assoc = associate(estimated, ground_truth);
  const size_t n = assoc.pairs.size();

  // Optional closed-form alignment of the estimate onto the truth.
  double scale = 1.0;
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
  if (alignment != Alignment::kNone) {
    Eigen::Matrix3Xd src(3, n), dst(3, n);
    for (size_t i = 0; i < n; ++i) {
      src.col(i) = estimated.frames[assoc.pairs[i].first].world_from_camera.translation();
      dst.col(i) = ground_truth.frames[assoc.pairs[i].second].world_from_camera.translation();
    }
    const Eigen::Matrix4d t =
        Eigen::umeyama(src, dst, alignment == Alignment::kSimilarity);
    const Eigen::Matrix3d sr = t.topLeftCorner<3, 3>();
    scale = std::cbrt(sr.determinant());
    rot = sr / scale;
    trans = t.topRightCorner<3, 1>();
  }

  AteResult result;
  result.per_frame.reserve(n);
  double sum_sq_t = 0.0;
  double sum_sq_r = 0.0;
  for (const auto& [e, g] : assoc.pairs) {
    const Pose& est = estimated.frames[e].world_from_camera;
    const Pose& ref = ground_truth.frames[g].world_from_camera;
    const Eigen::Vector3d c = scale * (rot * est.translation()) + trans;
    const double t_err = (c - ref.translation()).norm();
    const Eigen::Matrix3d r_err = ref.rotation().transpose() * (rot * est.rotation());
    const double angle = rotation_angle(Pose(r_err, Eigen::Vector3d::Zero()));
    const double r_err_deg = angle * 180.0 / M_PI;
    result.per_frame.push_back(FrameError{estimated.frames[e].timestamp, t_err, r_err_deg});
    sum_sq_t += t_err * t_err;
    sum_sq_r += r_err_deg * r_err_deg;
  }
  result.translation_rmse = std::sqrt(sum_sq_t / n);
  result.rotation_rmse_deg = std::sqrt(sum_sq_r / n);
  return result;
}

double structure_rmse(const std::vector<Eigen::Vector3d>& landmarks,
                      const std::vector<Primitive>& scene) {
  if (landmarks.empty() || scene.empty()) {
    return 0.0;
  }
  double sum_sq = 0.0;
  for (const Eigen::Vector3d& p : landmarks) {
    const double d = scene_signed_distance(scene, p);
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / landmarks.size());
}

double structure_rmse_points(const std::vector<Eigen::Vector3d>& landmarks,
                             const std::vector<Eigen::Vector3d>& reference) {
  if (landmarks.empty() || reference.empty()) {
    return 0.0;
  }
  double sum_sq = 0.0;
  for (const Eigen::Vector3d& p : landmarks) {
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d& r : reference) {
      best = std::min(best, (p - r).squaredNorm());
    }
    sum_sq += best;
  }
  return std::sqrt(sum_sq / landmarks.size());
}

double interframe_scale(const sim::Trajectory& estimated, const sim::Trajectory& ground_truth) {
  const Association assoc = associate(estimated, ground_truth);
  double est_len = 0.0;
  double ref_len = 0.0;
  for (size_t i = 1; i < assoc.pairs.size(); ++i) {
    const auto& [e0, g0] = assoc.pairs[i - 1];
    const auto& [e1, g1] = assoc.pairs[i];
    est_len += (estimated.frames[e1].world_from_camera.translation() -
                estimated.frames[e0].world_from_camera.translation())
                   .norm();
    ref_len += (ground_truth.frames[g1].world_from_camera.translation() -
                ground_truth.frames[g0].world_from_camera.translation())
                   .norm();
  }
  return ref_len > 0.0 ? est_len / ref_len : 1.0;
}

}  // namespace sdfloc::eval
