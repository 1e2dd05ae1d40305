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

#include "ndt_atlas/ndt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ndt_atlas/log.hpp"
#include "ndt_atlas/parallel.hpp"

namespace ndt_atlas {
namespace {

// Eigenvalues below this fraction of the largest are clamped up, the
// standard conditioning for near-planar and near-linear cells.
constexpr double kEigenvalueRatioFloor = 1e-3;
// Degenerate cells (all points coincident) get this absolute variance so
// the inverse always exists.
constexpr double kAbsoluteVarianceFloor = 1e-9;

constexpr double kMonotonicitySlack = 1e-12;

// Everything about the pose that the per-point derivative loop needs:
// the transform itself and the first/second derivatives of the rotation
// with respect to roll, pitch, yaw.
struct PoseExpansion {
  RigidTransform transform;
  Eigen::Matrix3d d_rot[3];     // d R / d(roll|pitch|yaw)
  Eigen::Matrix3d d2_rot[3][3];  // second derivatives, symmetric in (j, k)
};

PoseExpansion expand_pose(const Pose6& pose) {
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);

  Eigen::Matrix3d rx, ry, rz, rx1, ry1, rz1, rx2, ry2, rz2;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  rx1 << 0, 0, 0, 0, -sr, -cr, 0, cr, -sr;
  rx2 << 0, 0, 0, 0, -cr, sr, 0, -sr, -cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  ry1 << -sp, 0, cp, 0, 0, 0, -cp, 0, -sp;
  ry2 << -cp, 0, -sp, 0, 0, 0, sp, 0, -cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  rz1 << -sy, -cy, 0, cy, -sy, 0, 0, 0, 0;
  rz2 << -cy, sy, 0, -sy, -cy, 0, 0, 0, 0;

  PoseExpansion e;
  e.transform.rotation = rz * ry * rx;
  e.transform.translation = pose.translation();
  e.d_rot[0] = rz * ry * rx1;
  e.d_rot[1] = rz * ry1 * rx;
  e.d_rot[2] = rz1 * ry * rx;
  e.d2_rot[0][0] = rz * ry * rx2;
  e.d2_rot[0][1] = rz * ry1 * rx1;
  e.d2_rot[0][2] = rz1 * ry * rx1;
  e.d2_rot[1][1] = rz * ry2 * rx;
  e.d2_rot[1][2] = rz1 * ry1 * rx;
  e.d2_rot[2][2] = rz2 * ry * rx;
  e.d2_rot[1][0] = e.d2_rot[0][1];
  e.d2_rot[2][0] = e.d2_rot[0][2];
  e.d2_rot[2][1] = e.d2_rot[1][2];
  return e;
}

// Calls fn(voxel) for every distribution associated with the transformed
// point under the chosen association mode.
template <typename Fn>
void for_each_associated(const NDVoxelGrid& grid,
                         const Eigen::Vector3d& transformed,
                         VoxelAssociation association, Fn fn) {
  if (association == VoxelAssociation::kContaining) {
    if (const NDVoxel* v = grid.voxel_at(transformed)) {
      fn(*v);
    }
    return;
  }
  const VoxelKey center = voxel_key_of(transformed, grid.resolution());
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const VoxelKey key{center.ix + dx, center.iy + dy, center.iz + dz};
        if (const NDVoxel* v = grid.voxel_by_key(key)) {
          fn(*v);
        }
      }
    }
  }
}

}  // namespace

NDVoxelGrid::NDVoxelGrid(double resolution, int min_points_per_voxel)
    : resolution_(resolution), min_points_per_voxel_(min_points_per_voxel) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("NDVoxelGrid: resolution must be > 0");
  }
  if (min_points_per_voxel < 4) {
    throw std::invalid_argument(
        "NDVoxelGrid: min_points_per_voxel must be >= 4");
  }
}

Eigen::Vector3d NDVoxelGrid::corner_of(const VoxelKey& key) const {
  return {static_cast<double>(key.ix) * resolution_,
          static_cast<double>(key.iy) * resolution_,
          static_cast<double>(key.iz) * resolution_};
}

void NDVoxelGrid::insert(const Scan& scan) {
  for (const Point& p : scan.points) {
    const Eigen::Vector3d pos = p.position();
    const VoxelKey key = voxel_key_of(pos, resolution_);
    Cell& cell = cells_[key];
    const Eigen::Vector3d local = pos - corner_of(key);
    cell.sum += local;
    cell.outer_sum += local * local.transpose();
    ++cell.count;
    finalize(key, cell);

    if (point_count_ == 0) {
      bounds_.min = bounds_.max = pos;
    } else {
      bounds_.min = bounds_.min.cwiseMin(pos);
      bounds_.max = bounds_.max.cwiseMax(pos);
    }
    ++point_count_;
  }
}

void NDVoxelGrid::finalize(const VoxelKey& key, Cell& cell) {
  if (cell.count < min_points_per_voxel_) {
    return;
  }
  const double n = static_cast<double>(cell.count);
  const Eigen::Vector3d mean_local = cell.sum / n;
  Eigen::Matrix3d cov =
      cell.outer_sum / n - mean_local * mean_local.transpose();
  cov = (0.5 * (cov + cov.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eigen(cov);
  Eigen::Vector3d values = eigen.eigenvalues();  // ascending
  const double floor = std::max(kEigenvalueRatioFloor * values[2],
                                kAbsoluteVarianceFloor);
  values = values.cwiseMax(floor);

  const Eigen::Matrix3d& vectors = eigen.eigenvectors();
  cell.voxel.mean = mean_local + corner_of(key);
  cell.voxel.covariance =
      vectors * values.asDiagonal() * vectors.transpose();
  cell.voxel.inverse_covariance =
      vectors * values.cwiseInverse().asDiagonal() * vectors.transpose();
  cell.voxel.count = cell.count;
  if (!cell.has_distribution) {
    cell.has_distribution = true;
    ++voxel_count_;
  }
}

const NDVoxel* NDVoxelGrid::voxel_at(const Eigen::Vector3d& p) const {
  return voxel_by_key(voxel_key_of(p, resolution_));
}

const NDVoxel* NDVoxelGrid::voxel_by_key(const VoxelKey& key) const {
  const auto it = cells_.find(key);
  if (it == cells_.end() || !it->second.has_distribution) {
    return nullptr;
  }
  return &it->second.voxel;
}

std::vector<VoxelKey> NDVoxelGrid::voxel_keys_sorted() const {
  std::vector<VoxelKey> keys;
  keys.reserve(voxel_count_);
  for (const auto& [key, cell] : cells_) {
    if (cell.has_distribution) {
      keys.push_back(key);
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

NDVoxelGrid build_nd_grid(const Scan& reference, double resolution,
                          int min_points_per_voxel) {
  if (reference.empty()) {
    throw std::invalid_argument("empty reference");
  }
  NDVoxelGrid grid(resolution, min_points_per_voxel);
  grid.insert(reference);
  return grid;
}

double score(const NDVoxelGrid& grid, const Scan& scan, const Pose6& pose,
             VoxelAssociation association, int threads) {
  const RigidTransform transform = to_matrix(pose);
  const auto& points = scan.points;

  auto per_chunk = [&](std::size_t begin, std::size_t end) {
    double e = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d x = transform.apply(points[i].position());
      for_each_associated(grid, x, association, [&](const NDVoxel& voxel) {
        const Eigen::Vector3d d = x - voxel.mean;
        const double q = d.dot(voxel.inverse_covariance * d);
        e += std::exp(-0.5 * q);
      });
    }
    return e;
  };
  return chunked_reduce<double>(points.size(), threads, 0.0, per_chunk,
                                [](double a, double b) { return a + b; });
}

ScoreDerivatives score_derivatives(const NDVoxelGrid& grid, const Scan& scan,
                                   const Pose6& pose,
                                   VoxelAssociation association, int threads) {
  const PoseExpansion e = expand_pose(pose);
  const auto& points = scan.points;

  auto per_chunk = [&](std::size_t begin, std::size_t end) {
    ScoreDerivatives acc;
    Eigen::Matrix<double, 3, 6> jac;
    jac.setZero();
    jac.block<3, 3>(0, 0).setIdentity();

    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d x0 = points[i].position();
      const Eigen::Vector3d x = e.transform.apply(x0);

      // Jacobian of x' with respect to the pose vector. The translation
      // block is constant; the rotation block depends on the raw point.
      jac.col(3) = e.d_rot[0] * x0;
      jac.col(4) = e.d_rot[1] * x0;
      jac.col(5) = e.d_rot[2] * x0;

      bool hit = false;
      for_each_associated(grid, x, association, [&](const NDVoxel& voxel) {
        hit = true;
        const Eigen::Vector3d d = x - voxel.mean;
        const Eigen::Vector3d u = voxel.inverse_covariance * d;
        const double s = std::exp(-0.5 * d.dot(u));

        const Vector6d a = jac.transpose() * u;
        acc.score += s;
        acc.gradient += s * a;

        const Eigen::Matrix<double, 3, 6> w = voxel.inverse_covariance * jac;
        Matrix6d h = jac.transpose() * w - a * a.transpose();
        // Second derivative of x' is nonzero only in the rotation block.
        for (int j = 0; j < 3; ++j) {
          for (int k = j; k < 3; ++k) {
            const double c = u.dot(e.d2_rot[j][k] * x0);
            h(3 + j, 3 + k) += c;
            if (k != j) {
              h(3 + k, 3 + j) += c;
            }
          }
        }
        acc.hessian += s * h;
      });
      if (hit) {
        ++acc.contributing_points;
      }
    }
    return acc;
  };

  auto combine = [](ScoreDerivatives a, const ScoreDerivatives& b) {
    a.score += b.score;
    a.gradient += b.gradient;
    a.hessian += b.hessian;
    a.contributing_points += b.contributing_points;
    return a;
  };
  return chunked_reduce<ScoreDerivatives>(points.size(), threads,
                                          ScoreDerivatives{}, per_chunk,
                                          combine);
}

AlignParams AlignParams::from_config(const RunConfig& config) {
  AlignParams params;
  params.max_iterations = config.max_iterations;
  params.fitness_distance_cap = config.ndt_resolution;
  return params;
}

RegistrationResult newton_align(const NDVoxelGrid& grid,
                                const KdTree& reference, const Scan& scan,
                                const Pose6& initial,
                                const AlignParams& params) {
  if (grid.empty()) {
    throw std::invalid_argument("newton_align: grid has no distributions");
  }
  if (scan.empty()) {
    throw std::invalid_argument("newton_align: empty scan");
  }

  RegistrationResult result;
  Pose6 pose = initial;

  // All objective bookkeeping goes through score() so trace entries are
  // comparable bit-for-bit.
  double f = -score(grid, scan, pose, params.association, params.threads);
  result.score_trace.push_back(f);

  auto pose_plus = [](const Pose6& p, const Vector6d& delta) {
    // Additive update on the parameter vector.
    Pose6 q = p;
    q.x += delta[0];
    q.y += delta[1];
    q.z += delta[2];
    q.roll += delta[3];
    q.pitch += delta[4];
    q.yaw += delta[5];
    return q;
  };

  for (int iteration = 0; iteration < params.max_iterations; ++iteration) {
    const ScoreDerivatives current = score_derivatives(
        grid, scan, pose, params.association, params.threads);
    if (current.contributing_points == 0) {
      // E = 0 landscape: no voxel sees the scan, nothing to optimize.
      log_warn("newton_align: no grid support at current pose, breakdown");
      result.breakdown = true;
      break;
    }

    double lambda = 0.0;
    int increases = 0;
    bool accepted = false;
    Vector6d applied_step = Vector6d::Zero();
    Pose6 accepted_pose;
    double accepted_f = 0.0;

    while (true) {
      Matrix6d damped = current.hessian;
      if (lambda > 0.0) {
        damped.diagonal().array() += lambda;
      }
      Eigen::LLT<Matrix6d> llt(damped);
      bool ok = llt.info() == Eigen::Success;
      Vector6d step = Vector6d::Zero();
      if (ok) {
        step = llt.solve(-current.gradient);
        ok = step.allFinite();
      }
      if (ok) {
        // Trust-region style clamp, preserving the step direction.
        const double t_norm = step.head<3>().norm();
        const double r_norm = step.tail<3>().norm();
        double scale = 1.0;
        if (t_norm > params.max_step_translation) {
          scale = std::min(scale, params.max_step_translation / t_norm);
        }
        if (r_norm > params.max_step_rotation) {
          scale = std::min(scale, params.max_step_rotation / r_norm);
        }
        step *= scale;

        const Pose6 candidate = pose_plus(pose, step);
        const double f_candidate =
            -score(grid, scan, candidate, params.association, params.threads);
        if (f_candidate <= f + kMonotonicitySlack) {
          accepted = true;
          applied_step = step;
          accepted_pose = candidate;
          accepted_f = f_candidate;
          break;
        }
      }
      lambda = lambda == 0.0 ? params.initial_damping : lambda * 10.0;
      if (++increases > params.max_damping_increases) {
        break;
      }
    }

    if (!accepted) {
      log_warn("newton_align: damping exhausted, optimization breakdown");
      result.breakdown = true;
      break;
    }

    pose = accepted_pose;
    f = accepted_f;
    ++result.iterations;
    result.score_trace.push_back(f);

    const bool small_step =
        applied_step.head<3>().norm() < params.translation_epsilon &&
        applied_step.tail<3>().norm() < params.rotation_epsilon;
    if (small_step) {
      result.converged = true;
      break;
    }
  }

  result.pose = pose;
  const double n = static_cast<double>(scan.size());
  result.tp_score = -result.score_trace.back() / n;
  const FitnessMetrics fm =
      fitness_metrics(reference, scan, pose, params.fitness_distance_cap);
  result.fitness_score = fm.fitness_score;
  result.tp_paper = fm.tp_paper;
  return result;
}

FitnessMetrics fitness_metrics(const KdTree& reference, const Scan& scan,
                               const Pose6& pose, double distance_cap) {
  if (reference.empty() || scan.empty()) {
    throw std::invalid_argument("fitness_metrics: empty cloud");
  }
  const RigidTransform transform = to_matrix(pose);
  double sum = 0.0;
  for (const Point& p : scan.points) {
    const Eigen::Vector3d x = transform.apply(p.position());
    const auto [index, d_sq] = reference.nearest(x);
    sum += std::min(std::sqrt(d_sq), distance_cap);
  }
  FitnessMetrics fm;
  const double n = static_cast<double>(scan.size());
  fm.fitness_score = sum / n;
  fm.tp_paper = fm.fitness_score / n;
  return fm;
}

FitnessMetrics fitness_metrics(const Scan& reference, const Scan& scan,
                               const Pose6& pose, double distance_cap) {
  return fitness_metrics(KdTree(reference), scan, pose, distance_cap);
}

}  // namespace ndt_atlas
