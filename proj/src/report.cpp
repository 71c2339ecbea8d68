// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/optim/report.hpp"

namespace sdfloc {

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kConverged:
      return "converged";
    case TerminationReason::kMaxIterations:
      return "max_iterations";
    case TerminationReason::kSingularSystem:
      return "singular_system";
    case TerminationReason::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

}  // namespace sdfloc
