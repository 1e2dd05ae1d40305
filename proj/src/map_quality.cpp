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

#include "ndt_atlas/map_quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ndt_atlas/parallel.hpp"

namespace ndt_atlas {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Neighborhood {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  std::vector<std::size_t> indices;
};

std::optional<Neighborhood> neighborhood_stats(const Scan& map,
                                               const KdTree& tree,
                                               std::size_t index,
                                               double radius) {
  Neighborhood n;
  n.indices = tree.radius_search(map.points[index].position(), radius);
  if (n.indices.size() < kMinNeighborhood) {
    return std::nullopt;
  }
  for (const std::size_t i : n.indices) {
    n.mean += map.points[i].position();
  }
  n.mean /= static_cast<double>(n.indices.size());
  for (const std::size_t i : n.indices) {
    const Eigen::Vector3d d = map.points[i].position() - n.mean;
    n.covariance += d * d.transpose();
  }
  n.covariance /= static_cast<double>(n.indices.size());
  return n;
}

std::optional<double> entropy_of(const Neighborhood& n) {
  const double det = n.covariance.determinant();
  if (det <= kDeterminantFloor) {
    return std::nullopt;
  }
  // 0.5 * ln((2 pi e)^3 det Sigma)
  const double two_pi_e = 2.0 * M_PI * std::exp(1.0);
  return 0.5 * std::log(two_pi_e * two_pi_e * two_pi_e * det);
}

double plane_variance_of(const Scan& map, const Neighborhood& n) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eigen(n.covariance);
  const Eigen::Vector3d normal = eigen.eigenvectors().col(0);
  std::vector<double> distances;
  distances.reserve(n.indices.size());
  for (const std::size_t i : n.indices) {
    distances.push_back(
        std::abs(normal.dot(map.points[i].position() - n.mean)));
  }
  return percentile(std::move(distances), 0.75);
}

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile of empty sample");
  }
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= values.size()) {
    return values.back();
  }
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::optional<double> point_entropy(const Scan& map, const KdTree& tree,
                                    std::size_t index, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("point_entropy: radius must be > 0");
  }
  const auto n = neighborhood_stats(map, tree, index, radius);
  if (!n) {
    return std::nullopt;
  }
  return entropy_of(*n);
}

std::optional<double> point_entropy(const Scan& map, std::size_t index,
                                    double radius) {
  return point_entropy(map, KdTree(map), index, radius);
}

std::optional<double> point_plane_variance(const Scan& map,
                                           const KdTree& tree,
                                           std::size_t index, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("point_plane_variance: radius must be > 0");
  }
  const auto n = neighborhood_stats(map, tree, index, radius);
  if (!n) {
    return std::nullopt;
  }
  return plane_variance_of(map, *n);
}

std::optional<double> point_plane_variance(const Scan& map, std::size_t index,
                                           double radius) {
  return point_plane_variance(map, KdTree(map), index, radius);
}

MapQualityReport map_quality(const Scan& map, double radius, int threads) {
  if (map.empty()) {
    throw std::invalid_argument("map_quality: empty map");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("map_quality: radius must be > 0");
  }
  const KdTree tree(map);

  MapQualityReport report;
  report.radius = radius;
  report.per_point_entropy.assign(map.size(), kNaN);
  report.per_point_plane_variance.assign(map.size(), kNaN);

  // Per-point results go to dedicated slots, so the parallel schedule
  // cannot affect the outcome.
  parallel_for(map.size(), threads, [&](std::size_t i) {
    const auto n = neighborhood_stats(map, tree, i, radius);
    if (!n) {
      return;
    }
    if (const auto h = entropy_of(*n)) {
      report.per_point_entropy[i] = *h;
    }
    report.per_point_plane_variance[i] = plane_variance_of(map, *n);
  });

  double entropy_sum = 0.0, variance_sum = 0.0;
  std::size_t entropy_count = 0, variance_count = 0, skipped = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const bool has_entropy = !std::isnan(report.per_point_entropy[i]);
    const bool has_variance = !std::isnan(report.per_point_plane_variance[i]);
    if (has_entropy) {
      entropy_sum += report.per_point_entropy[i];
      ++entropy_count;
    }
    if (has_variance) {
      variance_sum += report.per_point_plane_variance[i];
      ++variance_count;
    }
    if (!has_entropy && !has_variance) {
      ++skipped;
    }
  }
  if (entropy_count == 0 || variance_count == 0) {
    throw std::runtime_error("degenerate map");
  }
  report.mme = entropy_sum / static_cast<double>(entropy_count);
  report.mpv = variance_sum / static_cast<double>(variance_count);
  report.skipped_points = skipped;
  return report;
}

}  // namespace ndt_atlas
