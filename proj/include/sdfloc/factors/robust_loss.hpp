// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace sdfloc {

/// Huber loss on whitened residual norms. Quadratic below delta, linear
/// above, C1 at the knee. The default delta is the 95%-efficiency
/// constant.
struct RobustLoss {
  double delta = 1.345;

  /// rho(s): s^2 for s <= delta, delta * (2 s - delta) above.
  double energy(double whitened_norm) const {
    const double s = whitened_norm;
    return s <= delta ? s * s : delta * (2.0 * s - delta);
  }

  /// IRLS attenuation rho'(s) / (2 s) in (0, 1]; 1 at and below delta.
  double weight(double whitened_norm) const {
    return whitened_norm <= delta ? 1.0 : delta / whitened_norm;
  }
};

}  // namespace sdfloc
