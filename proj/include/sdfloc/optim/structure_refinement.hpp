// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sdfloc/optim/problem.hpp"
#include "sdfloc/optim/report.hpp"
#include "sdfloc/optim/solver_config.hpp"

namespace sdfloc {

/// Minimizes E_repro + lambda * E_sdf over landmark positions with all
/// keyframe poses frozen. With poses fixed the landmarks decouple, so each
/// is solved by its own 3-variable Levenberg-Marquardt loop.
///
/// A landmark is refined when it has at least two active reprojection
/// factors, or one plus a contributing SDF factor (lambda > 0, query
/// observed); otherwise it is skipped and counted underconstrained.
/// Landmarks whose SDF query becomes unobserved mid-solve migrate
/// permanently to the vision-only set.
StructureReport refine_structure(Problem& problem, const SolverConfig& config);

}  // namespace sdfloc
