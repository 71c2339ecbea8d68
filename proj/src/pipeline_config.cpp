// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/pipeline/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdfloc/errors.hpp"
#include "sdfloc/util/keyvalue.hpp"

namespace sdfloc::pipeline {
namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
    return path;
  }
  return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

void PipelineConfig::validate() const {
  const auto require_file = [](const std::string& path, const char* what) {
    if (path.empty()) {
      throw ConfigError(std::string("pipeline config: missing ") + what);
    }
    if (!std::filesystem::exists(path)) {
      throw ConfigError(std::string("pipeline config: ") + what + " does not exist: " + path);
    }
  };
  require_file(map_file, "map");
  require_file(scene_file, "scene");
  require_file(trajectory_file, "trajectory");
  if (keyframe_stride < 1) {
    throw ConfigError("pipeline config: keyframe_stride must be >= 1");
  }
  if (num_anchors < 8) {
    throw ConfigError("pipeline config: num_anchors must be >= 8");
  }
  if (sigma_px < 0.0 || structure_sigma < 0.0 || sigma_odom_t < 0.0 || sigma_odom_r_deg < 0.0) {
    throw ConfigError("pipeline config: noise sigmas must be non-negative");
  }
  if (!(odom_scale > 0.0)) {
    throw ConfigError("pipeline config: odom_scale must be positive");
  }
  if (max_level < 0 || max_level > 5) {
    throw ConfigError("pipeline config: max_level must be in [0, 5]");
  }
  if (!(max_raycast_range > 0.0)) {
    throw ConfigError("pipeline config: max_raycast_range must be positive");
  }
  if (joint_every < 1) {
    throw ConfigError("pipeline config: joint_every must be >= 1");
  }
  intrinsics();  // validates the camera block
  solver.validate();
}

PipelineConfig PipelineConfig::from_text(const std::string& text, const std::string& base_dir) {
  PipelineConfig config;
  config.solver = SolverConfig::from_text(text);

  const KeyValueMap kv = parse_key_values(text);
  std::string path;
  if (kv.get("map", path)) {
    config.map_file = resolve(base_dir, path);
  }
  if (kv.get("scene", path)) {
    config.scene_file = resolve(base_dir, path);
  }
  if (kv.get("trajectory", path)) {
    config.trajectory_file = resolve(base_dir, path);
  }
  if (kv.get("output_dir", path)) {
    config.output_dir = resolve(base_dir, path);
  }
  kv.get("fx", config.fx);
  kv.get("fy", config.fy);
  kv.get("cx", config.cx);
  kv.get("cy", config.cy);
  kv.get("width", config.width);
  kv.get("height", config.height);
  kv.get("keyframe_stride", config.keyframe_stride);
  kv.get("num_anchors", config.num_anchors);
  kv.get("sigma_px", config.sigma_px);
  kv.get("max_level", config.max_level);
  kv.get("structure_sigma", config.structure_sigma);
  kv.get("max_raycast_range", config.max_raycast_range);
  kv.get("joint_every", config.joint_every);
  kv.get("sigma_odom_t", config.sigma_odom_t);
  kv.get("sigma_odom_r_deg", config.sigma_odom_r_deg);
  kv.get("odom_scale", config.odom_scale);
  kv.get("init_perturb_tx", config.init_perturb_tx);
  kv.get("init_perturb_ty", config.init_perturb_ty);
  kv.get("init_perturb_tz", config.init_perturb_tz);
  kv.get("init_perturb_rx_deg", config.init_perturb_rx_deg);
  kv.get("init_perturb_ry_deg", config.init_perturb_ry_deg);
  kv.get("init_perturb_rz_deg", config.init_perturb_rz_deg);
  int seed = 1;
  if (kv.get("seed", seed)) {
    if (seed < 0) {
      throw ConfigError("pipeline config: seed must be non-negative");
    }
    config.seed = static_cast<uint64_t>(seed);
  }
  // Solver keys were consumed by SolverConfig::from_text on its own pass;
  // mark them consumed here too so leftovers are genuine typos.
  for (const char* key :
       {"lambda", "beta0", "beta_up", "beta_down", "beta_min", "beta_max", "max_iterations",
        "energy_tol", "step_tol", "th_sdf", "th_repro", "huber_delta", "min_pose_refine_points",
        "min_parallax_deg", "window"}) {
    double ignored;
    kv.get(key, ignored);
  }
  std::string ignored;
  kv.get("gauge", ignored);
  kv.reject_unconsumed();
  return config;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace sdfloc::pipeline
