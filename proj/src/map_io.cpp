// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/map/map_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "sdfloc/errors.hpp"

namespace sdfloc {
namespace {

static_assert(std::endian::native == std::endian::little,
              "map i/o assumes a little-endian host");

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw IoError(std::string("map file truncated reading ") + what);
  }
  return value;
}

}  // namespace

void save_map(const SdfMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write map file: " + path);
  }
  out.write("SDFM", 4);
  write_pod(out, kMapFormatVersion);
  write_pod(out, map.voxel_size());
  write_pod(out, map.sigma_sdf());
  write_pod(out, map.truncation_distance());
  for (int axis = 0; axis < 3; ++axis) {
    write_pod(out, map.origin()[axis]);
  }

  std::vector<BlockIndex> order;
  order.reserve(map.blocks().size());
  for (const auto& [index, block] : map.blocks()) {
    order.push_back(index);
  }
  std::sort(order.begin(), order.end(), [](const BlockIndex& a, const BlockIndex& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });

  write_pod(out, static_cast<uint64_t>(order.size()));
  for (const BlockIndex& index : order) {
    write_pod(out, index.x);
    write_pod(out, index.y);
    write_pod(out, index.z);
    const VoxelBlock& block = map.blocks().at(index);
    for (int i = 0; i < VoxelBlock::kVoxels; ++i) {
      write_pod(out, block.distance[i]);
      write_pod(out, block.observed[i]);
    }
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::unique_ptr<SdfMap> load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open map file: " + path);
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SDFM", 4) != 0) {
    throw IoError("not a map file (bad magic): " + path);
  }
  const auto version = read_pod<uint32_t>(in, "version");
  if (version != kMapFormatVersion) {
    throw IoError("unsupported map format version " + std::to_string(version));
  }
  const auto voxel_size = read_pod<double>(in, "voxel_size");
  const auto sigma_sdf = read_pod<double>(in, "sigma_sdf");
  const auto truncation = read_pod<double>(in, "truncation");
  Eigen::Vector3d origin;
  for (int axis = 0; axis < 3; ++axis) {
    origin[axis] = read_pod<double>(in, "origin");
  }
  auto map = std::make_unique<SdfMap>(voxel_size, origin, sigma_sdf, truncation);

  const auto block_count = read_pod<uint64_t>(in, "block count");
  for (uint64_t b = 0; b < block_count; ++b) {
    BlockIndex index;
    index.x = read_pod<int32_t>(in, "block coord");
    index.y = read_pod<int32_t>(in, "block coord");
    index.z = read_pod<int32_t>(in, "block coord");
    VoxelBlock& block = map->block_for_write(index);
    for (int i = 0; i < VoxelBlock::kVoxels; ++i) {
      block.distance[i] = read_pod<float>(in, "distance");
      block.observed[i] = read_pod<uint8_t>(in, "observed");
    }
  }
  map->finalize();
  return map;
}

}  // namespace sdfloc
