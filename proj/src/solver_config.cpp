// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/solver_config.hpp"

#include <fstream>
#include <sstream>

#include "sdfloc/errors.hpp"
#include "sdfloc/util/keyvalue.hpp"

namespace sdfloc {

void SolverConfig::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw ConfigError(std::string("solver config: ") + name + " must be positive");
    }
  };
  if (max_iterations <= 0) {
    throw ConfigError("solver config: max_iterations must be positive");
  }
  positive(beta0, "beta0");
  positive(beta_up, "beta_up");
  positive(beta_down, "beta_down");
  positive(beta_min, "beta_min");
  positive(beta_max, "beta_max");
  positive(energy_tol, "energy_tol");
  positive(step_tol, "step_tol");
  positive(th_sdf, "th_sdf");
  positive(th_repro, "th_repro");
  positive(huber_delta, "huber_delta");
  if (lambda < 0.0) {
    throw ConfigError("solver config: lambda must be non-negative");
  }
  if (min_pose_refine_points < 6) {
    throw ConfigError("solver config: min_pose_refine_points must be at least 6");
  }
  positive(min_parallax_deg, "min_parallax_deg");
  if (window < 0) {
    throw ConfigError("solver config: window must be non-negative");
  }
}

SolverConfig SolverConfig::from_text(const std::string& text) {
  SolverConfig config;
  const KeyValueMap kv = parse_key_values(text);
  kv.get("lambda", config.lambda);
  kv.get("beta0", config.beta0);
  kv.get("beta_up", config.beta_up);
  kv.get("beta_down", config.beta_down);
  kv.get("beta_min", config.beta_min);
  kv.get("beta_max", config.beta_max);
  kv.get("max_iterations", config.max_iterations);
  kv.get("energy_tol", config.energy_tol);
  kv.get("step_tol", config.step_tol);
  kv.get("th_sdf", config.th_sdf);
  kv.get("th_repro", config.th_repro);
  kv.get("huber_delta", config.huber_delta);
  kv.get("min_pose_refine_points", config.min_pose_refine_points);
  kv.get("min_parallax_deg", config.min_parallax_deg);
  kv.get("window", config.window);
  std::string gauge;
  if (kv.get("gauge", gauge)) {
    if (gauge == "auto") {
      config.gauge = GaugeMode::kAuto;
    } else if (gauge == "fixed_first") {
      config.gauge = GaugeMode::kFixedFirst;
    } else if (gauge == "sdf_anchored") {
      config.gauge = GaugeMode::kSdfAnchored;
    } else {
      throw ConfigError("solver config: gauge must be auto, fixed_first or sdf_anchored");
    }
  }
  config.validate();
  return config;
}

SolverConfig SolverConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace sdfloc
