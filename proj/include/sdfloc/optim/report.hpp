// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace sdfloc {

enum class TerminationReason {
  kConverged,
  kMaxIterations,   // best iterate returned, not_converged flag set
  kSingularSystem,  // damping escalation failed; best iterate returned
  kDegenerate,
};

const char* to_string(TerminationReason reason);

/// Outcome of one Levenberg-Marquardt round.
struct SolveReport {
  int iterations = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double initial_sdf_energy = 0.0;     // lambda-weighted contribution
  double final_sdf_energy = 0.0;
  double initial_repro_energy = 0.0;
  double final_repro_energy = 0.0;
  TerminationReason termination = TerminationReason::kConverged;
  bool converged() const { return termination == TerminationReason::kConverged; }
  /// Energies of the accepted iterates, initial state first. Non-increasing
  /// by construction while the active factor set is unchanged.
  std::vector<double> accepted_energies;
};

/// Outcome of the two-round joint optimization.
struct JointReport {
  SolveReport round1;
  SolveReport round2;
  int outliers_removed = 0;
  int sdf_factors_deactivated = 0;
  int migrated_to_vision_only = 0;
  std::vector<int> outlier_landmarks;
};

/// Outcome of structure-only refinement (per-landmark solves).
struct StructureReport {
  int landmarks_refined = 0;
  int landmarks_skipped_underconstrained = 0;
  int migrated_to_vision_only = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
};

}  // namespace sdfloc
