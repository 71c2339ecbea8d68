// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Block-hashed voxel grid of signed distances with trilinear value and
// gradient interpolation and zero-crossing ray casting. Blocks of 16^3
// voxels are keyed by integer block coordinate in a hash table. Distances
// are stored as f32 (the on-disk representation); vertex gradients are
// derived on finalize() and kept in double precision.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace sdfloc {

/// Global integer voxel index; the voxel center sits at
/// origin + (index + 0.5) * voxel_size per axis.
struct VoxelIndex {
  int32_t x = 0, y = 0, z = 0;

  bool operator==(const VoxelIndex&) const = default;
  VoxelIndex offset(int dx, int dy, int dz) const { return {x + dx, y + dy, z + dz}; }
};

struct BlockIndex {
  int32_t x = 0, y = 0, z = 0;
  bool operator==(const BlockIndex&) const = default;
};

struct BlockIndexHash {
  size_t operator()(const BlockIndex& b) const {
    // Spatial mixing hash over the three coordinates.
    return static_cast<size_t>(b.x) * 73856093u ^ static_cast<size_t>(b.y) * 19349669u ^
           static_cast<size_t>(b.z) * 83492791u;
  }
};

struct VoxelBlock {
  static constexpr int kEdge = 16;
  static constexpr int kVoxels = kEdge * kEdge * kEdge;

  std::array<float, kVoxels> distance{};
  std::array<uint8_t, kVoxels> observed{};
  // Derived per-vertex central-difference gradients; valid only where the
  // full 6-neighbor stencil is observed. Rebuilt by SdfMap::finalize().
  std::vector<Eigen::Vector3d> gradient;
  std::vector<uint8_t> gradient_valid;

  static int linear_index(int lx, int ly, int lz) {
    return (lz * kEdge + ly) * kEdge + lx;
  }
};

/// Interpolated distance and gradient at a query point.
struct SdfQuery {
  double distance = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

struct RayHit {
  double depth = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

class SdfMap {
 public:
  SdfMap(double voxel_size, const Eigen::Vector3d& origin, double sigma_sdf,
         double truncation_distance);

  double voxel_size() const { return voxel_size_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  double sigma_sdf() const { return sigma_sdf_; }
  double truncation_distance() const { return truncation_distance_; }
  size_t block_count() const { return blocks_.size(); }
  size_t observed_voxel_count() const;

  VoxelIndex voxel_index_of(const Eigen::Vector3d& p) const;
  Eigen::Vector3d voxel_center(const VoxelIndex& v) const;
  static BlockIndex block_of(const VoxelIndex& v);

  /// Stores a distance sample, clamped to +-truncation_distance, and marks
  /// the voxel observed. Only valid before finalize().
  void set_voxel(const VoxelIndex& v, double distance);

  /// Precomputes per-vertex gradients. Must be called once after all
  /// set_voxel() calls; the map is immutable afterwards.
  void finalize();
  bool finalized() const { return finalized_; }

  /// Stored (clamped, f32) distance at a voxel, empty if unobserved.
  std::optional<float> stored_distance(const VoxelIndex& v) const;

  /// Trilinear distance and gradient at p. The gradient blends the eight
  /// precomputed vertex gradients, following the map's smooth-gradient
  /// scheme rather than differentiating the trilinear interpolant.
  /// Empty ("unobserved") when any of the 8 surrounding voxel centers is
  /// unobserved or lacks a full gradient stencil.
  std::optional<SdfQuery> interpolate(const Eigen::Vector3d& p) const;

  /// Marches at 0.5 * voxel_size steps looking for the first positive to
  /// negative sign change, then refines the depth with one secant step on
  /// the interpolated distances. direction must be unit length (1e-9).
  /// Empty when there is no crossing within max_range or the ray leaves
  /// observed space after having entered it.
  std::optional<RayHit> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
                                double max_range) const;

  // Raw block access for serialization.
  const std::unordered_map<BlockIndex, VoxelBlock, BlockIndexHash>& blocks() const {
    return blocks_;
  }
  VoxelBlock& block_for_write(const BlockIndex& b);

 private:
  struct Corner {
    double distance;
    const Eigen::Vector3d* gradient;
  };
  bool fetch_corner(const VoxelIndex& v, Corner& out) const;

  double voxel_size_;
  Eigen::Vector3d origin_;
  double sigma_sdf_;
  double truncation_distance_;
  float clamp_limit_;  // largest f32 magnitude not exceeding truncation_distance_
  bool finalized_ = false;
  std::unordered_map<BlockIndex, VoxelBlock, BlockIndexHash> blocks_;
};

}  // namespace sdfloc
