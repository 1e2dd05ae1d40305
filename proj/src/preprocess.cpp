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

#include "ndt_atlas/preprocess.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ndt_atlas {

Scan range_filter(const Scan& scan, double min_range, double max_range) {
  if (!(min_range >= 0.0) || !(min_range < max_range)) {
    throw std::invalid_argument("range_filter: need 0 <= min_range < max_range");
  }
  Scan out;
  out.frame_id = scan.frame_id;
  out.stamp = scan.stamp;
  out.points.reserve(scan.points.size());
  const double min_sq = min_range * min_range;
  const double max_sq = max_range * max_range;
  for (const Point& p : scan.points) {
    const double r_sq = p.x * p.x + p.y * p.y + p.z * p.z;
    if (r_sq >= min_sq && r_sq <= max_sq) {
      out.points.push_back(p);
    }
  }
  return out;
}

Scan voxel_grid_filter(const Scan& scan, double leaf_size) {
  if (!(leaf_size > 0.0)) {
    throw std::invalid_argument("voxel_grid_filter: leaf_size must be > 0");
  }
  struct Accumulator {
    double x = 0.0, y = 0.0, z = 0.0, intensity = 0.0;
    std::size_t count = 0;
  };
  // std::map keeps the (ix, iy, iz) ordering contract for free.
  std::map<VoxelKey, Accumulator> cells;
  for (const Point& p : scan.points) {
    Accumulator& acc = cells[voxel_key_of(p.x, p.y, p.z, leaf_size)];
    acc.x += p.x;
    acc.y += p.y;
    acc.z += p.z;
    acc.intensity += p.intensity;
    ++acc.count;
  }

  Scan out;
  out.frame_id = scan.frame_id;
  out.stamp = scan.stamp;
  out.points.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    Point p;
    const double n = static_cast<double>(acc.count);
    p.x = acc.x / n;
    p.y = acc.y / n;
    p.z = acc.z / n;
    p.intensity = acc.intensity / n;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace ndt_atlas
