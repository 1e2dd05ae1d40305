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

#ifndef NDT_ATLAS_NDT_HPP_
#define NDT_ATLAS_NDT_HPP_

#include <cstddef>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "ndt_atlas/config.hpp"
#include "ndt_atlas/geometry.hpp"
#include "ndt_atlas/kdtree.hpp"
#include "ndt_atlas/preprocess.hpp"

namespace ndt_atlas {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// One cell of the ND grid: the Gaussian fitted to its points.
/// The stored covariance is the regularized one: eigenvalues are clamped
/// from below to 1e-3 times the largest, so the inverse exists and the
/// exponent in the score stays bounded on near-planar cells.
struct NDVoxel {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d inverse_covariance = Eigen::Matrix3d::Zero();
  int count = 0;
};

struct Box {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

/// Sparse uniform grid of per-cell Gaussians over a reference cloud.
/// Cells keep running sufficient statistics (in voxel-local coordinates,
/// which keeps the covariance well conditioned far from the origin), so
/// points can be inserted incrementally; a distribution is materialized
/// once a cell reaches min_points_per_voxel.
class NDVoxelGrid {
 public:
  NDVoxelGrid(double resolution, int min_points_per_voxel);

  /// Adds points and refreshes the distributions of the touched cells.
  void insert(const Scan& scan);

  double resolution() const { return resolution_; }
  int min_points_per_voxel() const { return min_points_per_voxel_; }

  /// Number of cells holding a distribution (count >= min_points_per_voxel).
  std::size_t voxel_count() const { return voxel_count_; }
  /// Number of cells containing at least one point.
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t point_count() const { return point_count_; }
  bool empty() const { return voxel_count_ == 0; }

  /// Distribution of the cell containing p, or nullptr.
  const NDVoxel* voxel_at(const Eigen::Vector3d& p) const;
  const NDVoxel* voxel_by_key(const VoxelKey& key) const;

  /// Axis-aligned bounds of all inserted points.
  const Box& bounds() const { return bounds_; }

  /// Keys of cells holding a distribution, in ascending (ix, iy, iz) order.
  std::vector<VoxelKey> voxel_keys_sorted() const;

 private:
  struct Cell {
    // Sums are relative to the cell's min corner.
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Matrix3d outer_sum = Eigen::Matrix3d::Zero();
    int count = 0;
    bool has_distribution = false;
    NDVoxel voxel;
  };

  void finalize(const VoxelKey& key, Cell& cell);
  Eigen::Vector3d corner_of(const VoxelKey& key) const;

  double resolution_;
  int min_points_per_voxel_;
  std::unordered_map<VoxelKey, Cell, VoxelKeyHash> cells_;
  std::size_t voxel_count_ = 0;
  std::size_t point_count_ = 0;
  Box bounds_;
};

/// Builds the grid of per-voxel Gaussian statistics for a reference cloud.
/// Throws std::invalid_argument("empty reference") on an empty cloud.
NDVoxelGrid build_nd_grid(const Scan& reference, double resolution,
                          int min_points_per_voxel = 6);

/// How scan points are associated with ND voxels when scoring: the single
/// cell containing the transformed point (the default), or the sum over
/// its 3x3x3 neighborhood for a smoother basin. Only the single-cell mode
/// keeps the per-point contribution <= 1.
enum class VoxelAssociation { kContaining, kNeighborhood27 };

/// The matching score E: the sum over scan points of
/// exp(-(x' - mean)^T Sigma^{-1} (x' - mean) / 2) evaluated in the
/// voxel(s) associated with the transformed point x'. Points landing in
/// empty cells contribute 0.
double score(const NDVoxelGrid& grid, const Scan& scan, const Pose6& pose,
             VoxelAssociation association = VoxelAssociation::kContaining,
             int threads = 1);

struct ScoreDerivatives {
  double score = 0.0;        // E
  Vector6d gradient = Vector6d::Zero();   // of f = -E
  Matrix6d hessian = Matrix6d::Zero();    // of f = -E, symmetric
  std::size_t contributing_points = 0;    // points that hit a distribution
};

/// Analytic first and second derivatives of f(t) = -E with respect to the
/// pose vector (x, y, z, roll, pitch, yaw), evaluated at `pose`.
ScoreDerivatives score_derivatives(
    const NDVoxelGrid& grid, const Scan& scan, const Pose6& pose,
    VoxelAssociation association = VoxelAssociation::kContaining,
    int threads = 1);

struct AlignParams {
  int max_iterations = 50;
  double translation_epsilon = 1e-3;  // convergence: max step norm [m]
  double rotation_epsilon = 1e-3;     // convergence: max step norm [rad]
  double max_step_translation = 1.0;  // per-iteration clamp [m]
  double max_step_rotation = 0.2;     // per-iteration clamp [rad]
  double initial_damping = 1e-4;
  int max_damping_increases = 10;
  VoxelAssociation association = VoxelAssociation::kContaining;
  double fitness_distance_cap = 1.0;  // nearest-neighbor cap [m]
  int threads = 1;

  static AlignParams from_config(const RunConfig& config);
};

struct RegistrationResult {
  Pose6 pose;
  int iterations = 0;
  double fitness_score = 0.0;
  double tp_paper = 0.0;  // fitness_score / N
  double tp_score = 0.0;  // E / N at the final pose
  bool converged = false;
  bool breakdown = false;
  std::vector<double> score_trace;  // f = -E, one entry per iterate
};

/// Newton iteration t <- t - H^{-1} g on f = -E, with Levenberg damping as
/// the monotonicity safeguard and a per-iteration step clamp. `reference`
/// is the kd-tree over the reference cloud used for the fitness metrics.
/// A grid with no distributions or an empty scan is a precondition
/// violation; a scan with no grid support (or a Hessian that damping
/// cannot rescue) sets `breakdown` and returns the best pose so far.
RegistrationResult newton_align(const NDVoxelGrid& grid,
                                const KdTree& reference, const Scan& scan,
                                const Pose6& initial,
                                const AlignParams& params);

struct FitnessMetrics {
  double fitness_score = 0.0;
  double tp_paper = 0.0;
};

/// Mean capped nearest-neighbor distance from the transformed scan to the
/// reference cloud, and its per-point normalization.
FitnessMetrics fitness_metrics(const KdTree& reference, const Scan& scan,
                               const Pose6& pose, double distance_cap);
FitnessMetrics fitness_metrics(const Scan& reference, const Scan& scan,
                               const Pose6& pose, double distance_cap);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_NDT_HPP_
