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

#ifndef NDT_ATLAS_GEOMETRY_HPP_
#define NDT_ATLAS_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ndt_atlas {

/// One LiDAR return. Positions are meters in the sensor or map frame.
/// Ring and timestamp are optional because not every driver emits them;
/// absence is represented explicitly, never by sentinel values.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  std::optional<std::uint32_t> ring;
  std::optional<double> timestamp;

  Eigen::Vector3d position() const { return {x, y, z}; }
};

/// An ordered collection of returns from one sweep.
struct Scan {
  std::vector<Point> points;
  std::string frame_id = "lidar";
  double stamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// 6-DOF pose as the parameter vector (x, y, z, roll, pitch, yaw).
/// Angles are radians and stored unnormalized; comparisons should go
/// through normalize_angle.
struct Pose6 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Eigen::Vector3d translation() const { return {x, y, z}; }
  bool is_finite() const;
};

/// Rigid transform x' = R x + t.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

/// Rotation convention is fixed project-wide as extrinsic X-Y-Z:
/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
RigidTransform to_matrix(const Pose6& pose);

/// Extracts (x, y, z, roll, pitch, yaw) from a rigid transform. Pitch is
/// reported in [-pi/2, pi/2]. At the gimbal-lock singularity
/// (|pitch| = pi/2) the yaw-roll ambiguity is resolved by setting roll = 0.
Pose6 from_matrix(const RigidTransform& transform);

/// Applies the pose to every point position; intensity, ring, timestamp,
/// and point order are preserved.
Scan transform_scan(const Scan& scan, const Pose6& pose);

/// compose(a, b) is the pose whose matrix is to_matrix(a) * to_matrix(b).
Pose6 compose(const Pose6& a, const Pose6& b);

/// inverse(a) composed with a gives the identity pose.
Pose6 inverse(const Pose6& a);

/// Euclidean distance between the translation parts of two poses.
double translation_distance(const Pose6& a, const Pose6& b);

/// Geodesic angle of the relative rotation between two poses, in [0, pi].
double rotation_distance(const Pose6& a, const Pose6& b);

struct TimedPose {
  double stamp = 0.0;
  Pose6 pose;
};

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_GEOMETRY_HPP_
