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

#ifndef NDT_ATLAS_MAP_QUALITY_HPP_
#define NDT_ATLAS_MAP_QUALITY_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "ndt_atlas/geometry.hpp"
#include "ndt_atlas/kdtree.hpp"

namespace ndt_atlas {

/// Map-quality scores. Per-point arrays align with the map's point order;
/// undefined entries (too few neighbors or a degenerate covariance) hold
/// NaN and are excluded from the means.
struct MapQualityReport {
  double mme = 0.0;  // mean map entropy [nats], may be negative
  double mpv = 0.0;  // mean plane variance [m]
  std::vector<double> per_point_entropy;
  std::vector<double> per_point_plane_variance;
  double radius = 0.0;
  std::size_t skipped_points = 0;
};

// Neighborhoods below this size have no meaningful covariance or plane.
inline constexpr std::size_t kMinNeighborhood = 5;
// Covariance determinants at or below this are treated as singular.
inline constexpr double kDeterminantFloor = 1e-30;

/// Differential entropy 0.5 * ln((2 pi e)^3 det Sigma) of the population
/// covariance of all map points within `radius` of point `index` (the
/// point itself included). nullopt when the neighborhood is too small or
/// det Sigma <= the floor.
std::optional<double> point_entropy(const Scan& map, const KdTree& tree,
                                    std::size_t index, double radius);
std::optional<double> point_entropy(const Scan& map, std::size_t index,
                                    double radius);

/// Upper quartile (75th percentile, linear interpolation) of the absolute
/// distances from the neighborhood points to their total-least-squares
/// plane. nullopt when the neighborhood is too small.
std::optional<double> point_plane_variance(const Scan& map,
                                           const KdTree& tree,
                                           std::size_t index, double radius);
std::optional<double> point_plane_variance(const Scan& map, std::size_t index,
                                           double radius);

/// Whole-map scores; means are taken over defined points only. Throws
/// std::runtime_error("degenerate map") when no point has a defined score.
MapQualityReport map_quality(const Scan& map, double radius, int threads = 1);

/// q-th percentile (q in [0, 1]) with linear interpolation between order
/// statistics.
double percentile(std::vector<double> values, double q);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_MAP_QUALITY_HPP_
