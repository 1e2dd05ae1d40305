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

#include "ndt_atlas/geometry.hpp"

#include <cmath>

namespace ndt_atlas {

bool Pose6::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
         std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw);
}

double normalize_angle(double radians) {
  double r = std::fmod(radians + M_PI, 2.0 * M_PI);
  if (r <= 0.0) {
    r += 2.0 * M_PI;
  }
  return r - M_PI;
}

RigidTransform to_matrix(const Pose6& pose) {
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);

  // R = Rz(yaw) * Ry(pitch) * Rx(roll), written out.
  Eigen::Matrix3d r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,  //
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,   //
      -sp, cp * sr, cp * cr;

  return RigidTransform{r, pose.translation()};
}

Pose6 from_matrix(const RigidTransform& transform) {
  const Eigen::Matrix3d& r = transform.rotation;
  Pose6 pose;
  pose.x = transform.translation.x();
  pose.y = transform.translation.y();
  pose.z = transform.translation.z();

  const double cp = std::sqrt(r(0, 0) * r(0, 0) + r(1, 0) * r(1, 0));
  pose.pitch = std::atan2(-r(2, 0), cp);
  if (cp < 1e-12) {
    // Gimbal lock: only yaw - roll (or yaw + roll) is observable.
    pose.roll = 0.0;
    pose.yaw = std::atan2(-r(0, 1), r(1, 1));
  } else {
    pose.yaw = std::atan2(r(1, 0), r(0, 0));
    pose.roll = std::atan2(r(2, 1), r(2, 2));
  }
  return pose;
}

Scan transform_scan(const Scan& scan, const Pose6& pose) {
  const RigidTransform t = to_matrix(pose);
  Scan out = scan;
  for (Point& p : out.points) {
    const Eigen::Vector3d q = t.apply(p.position());
    p.x = q.x();
    p.y = q.y();
    p.z = q.z();
  }
  return out;
}

Pose6 compose(const Pose6& a, const Pose6& b) {
  const RigidTransform ta = to_matrix(a);
  const RigidTransform tb = to_matrix(b);
  RigidTransform tc;
  tc.rotation = ta.rotation * tb.rotation;
  tc.translation = ta.rotation * tb.translation + ta.translation;
  return from_matrix(tc);
}

Pose6 inverse(const Pose6& a) {
  const RigidTransform t = to_matrix(a);
  RigidTransform inv;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation);
  return from_matrix(inv);
}

double translation_distance(const Pose6& a, const Pose6& b) {
  return (a.translation() - b.translation()).norm();
}

double rotation_distance(const Pose6& a, const Pose6& b) {
  const Eigen::Matrix3d rel =
      to_matrix(a).rotation.transpose() * to_matrix(b).rotation;
  // trace(R) = 1 + 2 cos(theta)
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace ndt_atlas
