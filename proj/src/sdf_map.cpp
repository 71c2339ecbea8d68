// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/map/sdf_map.hpp"

#include <cmath>
#include <stdexcept>

#include "sdfloc/errors.hpp"

namespace sdfloc {
namespace {

int32_t floor_div(int32_t a, int32_t b) {
  int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

}  // namespace

SdfMap::SdfMap(double voxel_size, const Eigen::Vector3d& origin, double sigma_sdf,
               double truncation_distance)
    : voxel_size_(voxel_size),
      origin_(origin),
      sigma_sdf_(sigma_sdf),
      truncation_distance_(truncation_distance) {
  if (voxel_size <= 0.0 || sigma_sdf <= 0.0 || truncation_distance <= 0.0) {
    throw ConfigError("SdfMap: voxel_size, sigma_sdf and truncation must be positive");
  }
  clamp_limit_ = static_cast<float>(truncation_distance_);
  if (static_cast<double>(clamp_limit_) > truncation_distance_) {
    clamp_limit_ = std::nextafter(clamp_limit_, 0.0f);
  }
}

size_t SdfMap::observed_voxel_count() const {
  size_t n = 0;
  for (const auto& [index, block] : blocks_) {
    for (uint8_t flag : block.observed) {
      n += flag;
    }
  }
  return n;
}

VoxelIndex SdfMap::voxel_index_of(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d scaled = (p - origin_) / voxel_size_;
  return {static_cast<int32_t>(std::floor(scaled.x())), static_cast<int32_t>(std::floor(scaled.y())),
          static_cast<int32_t>(std::floor(scaled.z()))};
}

Eigen::Vector3d SdfMap::voxel_center(const VoxelIndex& v) const {
  return origin_ + voxel_size_ * Eigen::Vector3d(v.x + 0.5, v.y + 0.5, v.z + 0.5);
}

BlockIndex SdfMap::block_of(const VoxelIndex& v) {
  return {floor_div(v.x, VoxelBlock::kEdge), floor_div(v.y, VoxelBlock::kEdge),
          floor_div(v.z, VoxelBlock::kEdge)};
}

VoxelBlock& SdfMap::block_for_write(const BlockIndex& b) {
  if (finalized_) {
    throw std::logic_error("SdfMap: write after finalize()");
  }
  return blocks_[b];
}

void SdfMap::set_voxel(const VoxelIndex& v, double distance) {
  const BlockIndex b = block_of(v);
  VoxelBlock& block = block_for_write(b);
  const int lx = v.x - b.x * VoxelBlock::kEdge;
  const int ly = v.y - b.y * VoxelBlock::kEdge;
  const int lz = v.z - b.z * VoxelBlock::kEdge;
  const int i = VoxelBlock::linear_index(lx, ly, lz);
  float d = static_cast<float>(std::clamp(distance, -truncation_distance_, truncation_distance_));
  d = std::clamp(d, -clamp_limit_, clamp_limit_);
  block.distance[i] = d;
  block.observed[i] = 1;
}

std::optional<float> SdfMap::stored_distance(const VoxelIndex& v) const {
  const BlockIndex b = block_of(v);
  const auto it = blocks_.find(b);
  if (it == blocks_.end()) {
    return std::nullopt;
  }
  const int i = VoxelBlock::linear_index(v.x - b.x * VoxelBlock::kEdge,
                                         v.y - b.y * VoxelBlock::kEdge,
                                         v.z - b.z * VoxelBlock::kEdge);
  if (!it->second.observed[i]) {
    return std::nullopt;
  }
  return it->second.distance[i];
}

void SdfMap::finalize() {
  const double inv_2h = 1.0 / (2.0 * voxel_size_);
  for (auto& [index, block] : blocks_) {
    block.gradient.assign(VoxelBlock::kVoxels, Eigen::Vector3d::Zero());
    block.gradient_valid.assign(VoxelBlock::kVoxels, 0);
  }
  for (auto& [index, block] : blocks_) {
    for (int lz = 0; lz < VoxelBlock::kEdge; ++lz) {
      for (int ly = 0; ly < VoxelBlock::kEdge; ++ly) {
        for (int lx = 0; lx < VoxelBlock::kEdge; ++lx) {
          const int i = VoxelBlock::linear_index(lx, ly, lz);
          if (!block.observed[i]) {
            continue;
          }
          const VoxelIndex v{index.x * VoxelBlock::kEdge + lx, index.y * VoxelBlock::kEdge + ly,
                             index.z * VoxelBlock::kEdge + lz};
          Eigen::Vector3d g;
          bool valid = true;
          for (int axis = 0; axis < 3 && valid; ++axis) {
            const VoxelIndex plus = v.offset(axis == 0, axis == 1, axis == 2);
            const VoxelIndex minus = v.offset(-(axis == 0), -(axis == 1), -(axis == 2));
            const auto dp = stored_distance(plus);
            const auto dm = stored_distance(minus);
            if (!dp || !dm) {
              valid = false;
              break;
            }
            g[axis] = (static_cast<double>(*dp) - static_cast<double>(*dm)) * inv_2h;
          }
          if (valid) {
            block.gradient[i] = g;
            block.gradient_valid[i] = 1;
          }
        }
      }
    }
  }
  finalized_ = true;
}

bool SdfMap::fetch_corner(const VoxelIndex& v, Corner& out) const {
  const BlockIndex b = block_of(v);
  const auto it = blocks_.find(b);
  if (it == blocks_.end()) {
    return false;
  }
  const VoxelBlock& block = it->second;
  const int i = VoxelBlock::linear_index(v.x - b.x * VoxelBlock::kEdge,
                                         v.y - b.y * VoxelBlock::kEdge,
                                         v.z - b.z * VoxelBlock::kEdge);
  if (!block.observed[i] || !block.gradient_valid[i]) {
    return false;
  }
  out.distance = static_cast<double>(block.distance[i]);
  out.gradient = &block.gradient[i];
  return true;
}

std::optional<SdfQuery> SdfMap::interpolate(const Eigen::Vector3d& p) const {
  // Interpolation cell: the 8 voxel centers surrounding p.
  const Eigen::Vector3d grid = (p - origin_) / voxel_size_ - Eigen::Vector3d::Constant(0.5);
  const Eigen::Vector3d base_f = grid.array().floor();
  const VoxelIndex base{static_cast<int32_t>(base_f.x()), static_cast<int32_t>(base_f.y()),
                        static_cast<int32_t>(base_f.z())};
  const Eigen::Vector3d frac = grid - base_f;

  Corner corners[8];
  for (int k = 0; k < 8; ++k) {
    const VoxelIndex v = base.offset(k & 1, (k >> 1) & 1, (k >> 2) & 1);
    if (!fetch_corner(v, corners[k])) {
      return std::nullopt;
    }
  }

  SdfQuery q;
  q.distance = 0.0;
  q.gradient.setZero();
  for (int k = 0; k < 8; ++k) {
    const double wx = (k & 1) ? frac.x() : 1.0 - frac.x();
    const double wy = ((k >> 1) & 1) ? frac.y() : 1.0 - frac.y();
    const double wz = ((k >> 2) & 1) ? frac.z() : 1.0 - frac.z();
    const double w = wx * wy * wz;
    q.distance += w * corners[k].distance;
    q.gradient += w * (*corners[k].gradient);
  }
  return q;
}

std::optional<RayHit> SdfMap::raycast(const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& direction, double max_range) const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("raycast: direction must be unit length");
  }
  const double step = 0.5 * voxel_size_;
  bool entered_observed = false;
  bool have_prev = false;
  double prev_t = 0.0;
  double prev_d = 0.0;
  for (double t = 0.0; t <= max_range; t += step) {
    const std::optional<SdfQuery> q = interpolate(origin + t * direction);
    if (!q) {
      if (entered_observed) {
        return std::nullopt;  // left observed space without a crossing
      }
      have_prev = false;
      continue;
    }
    entered_observed = true;
    const double d = q->distance;
    if (d <= 0.0) {
      if (!have_prev || prev_d <= 0.0) {
        // Started inside a surface: wait until the ray is back outside.
        have_prev = d > 0.0;
        prev_t = t;
        prev_d = d;
        continue;
      }
      // Secant refinement of the bracketed crossing.
      double hit_t = prev_t + prev_d * (t - prev_t) / (prev_d - d);
      hit_t = std::clamp(hit_t, prev_t, t);
      return RayHit{hit_t, origin + hit_t * direction};
    }
    have_prev = true;
    prev_t = t;
    prev_d = d;
  }
  return std::nullopt;
}

}  // namespace sdfloc
