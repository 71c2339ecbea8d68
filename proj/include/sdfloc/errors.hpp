// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sdfloc {

/// Rotation angle is within tolerance of pi; the logarithm map is not
/// uniquely defined there and the caller has to re-parametrize.
class AngleAtPiError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solve was requested with too few usable constraints.
class DegenerateProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint solve has neither a fixed keyframe nor any SDF factor to anchor
/// the global frame.
class GaugeUnfixedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic map construction was given no primitives.
class EmptySceneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulated keyframe observes fewer anchors than the tracking minimum.
class NoVisibleFeaturesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trajectory association found fewer than two matching timestamps.
class AssociationFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written, or its contents are malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdfloc
