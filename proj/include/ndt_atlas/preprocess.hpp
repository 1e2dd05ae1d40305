/*
 * Copyright 2026 The NDT Atlas Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NDT_ATLAS_PREPROCESS_HPP_
#define NDT_ATLAS_PREPROCESS_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>

#include "ndt_atlas/geometry.hpp"

namespace ndt_atlas {

/// Signed grid cell index. Indexing is true floor, so the cell
/// [0, leaf) maps to index 0 and boundary points belong to the
/// higher-index cell. This helper is the single source of truth for
/// voxel indexing across the voxel filter and the ND grid.
struct VoxelKey {
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  std::int64_t iz = 0;

  auto operator<=>(const VoxelKey&) const = default;
};

inline VoxelKey voxel_key_of(double x, double y, double z, double leaf_size) {
  return VoxelKey{static_cast<std::int64_t>(std::floor(x / leaf_size)),
                  static_cast<std::int64_t>(std::floor(y / leaf_size)),
                  static_cast<std::int64_t>(std::floor(z / leaf_size))};
}

inline VoxelKey voxel_key_of(const Eigen::Vector3d& p, double leaf_size) {
  return voxel_key_of(p.x(), p.y(), p.z(), leaf_size);
}

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    // splitmix64-style mixing of the three indices
    auto mix = [](std::uint64_t v) {
      v += 0x9e3779b97f4a7c15ULL;
      v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
      v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
      return v ^ (v >> 31);
    };
    std::uint64_t h = mix(static_cast<std::uint64_t>(k.ix));
    h = mix(h ^ static_cast<std::uint64_t>(k.iy));
    h = mix(h ^ static_cast<std::uint64_t>(k.iz));
    return static_cast<std::size_t>(h);
  }
};

/// Keeps exactly the points with min_range <= |p| <= max_range, measured
/// from the sensor origin. Must run before any map-frame transform.
/// Order is preserved.
Scan range_filter(const Scan& scan, double min_range, double max_range);

/// Replaces each occupied voxel by the centroid of x, y, z and intensity.
/// Ring and timestamp are dropped (the centroid belongs to no beam).
/// Output is ordered by ascending (ix, iy, iz).
Scan voxel_grid_filter(const Scan& scan, double leaf_size);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_PREPROCESS_HPP_
