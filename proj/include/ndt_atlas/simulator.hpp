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

#ifndef NDT_ATLAS_SIMULATOR_HPP_
#define NDT_ATLAS_SIMULATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ndt_atlas/geometry.hpp"

namespace ndt_atlas {

/// A multi-beam spinning LiDAR model. Beams are placed at uniform
/// vres_deg spacing centered inside the vertical field of view, which
/// reproduces uniform sensors exactly and approximates variable-spacing
/// sensors by their densest region; an explicit per-beam elevation table
/// overrides the uniform layout. Range noise is a single Gaussian sigma
/// even where datasheets give range-dependent schedules.
struct SensorPreset {
  std::string name = "custom";
  int channels = 16;
  double vfov_deg = 30.0;  // full span, symmetric about the horizon
  double vres_deg = 2.0;
  double hres_deg = 0.2;
  double max_range = 100.0;
  double min_range = 1.0;
  double range_sigma = 0.03;
  std::vector<double> elevations_deg;  // optional explicit beam table

  /// Beam elevations in radians, channel 0 first.
  std::vector<double> beam_elevations() const;
  int rays_per_revolution() const;
  void validate() const;  // throws std::invalid_argument

  static const std::vector<SensorPreset>& builtin();
  static SensorPreset by_name(const std::string& name);  // throws if unknown
  static SensorPreset from_file(const std::filesystem::path& path);
};

/// Analytic scene primitives. Closed-form ray intersections keep the
/// simulator's ground truth exact.
struct PlaneSurface {
  Pose6 pose;  // local z=0 plane through the pose origin
  double half_x = std::numeric_limits<double>::infinity();
  double half_y = std::numeric_limits<double>::infinity();
};

struct BoxSurface {
  Pose6 pose;
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
};

struct CylinderSurface {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // vertical axis
  double radius = 0.5;
  double half_height = 2.0;  // lateral surface only
};

using Primitive = std::variant<PlaneSurface, BoxSurface, CylinderSurface>;

struct Scene {
  std::vector<Primitive> primitives;

  static Scene from_file(const std::filesystem::path& path);
  static Scene from_text(const std::string& text, const std::string& origin);
};

/// Ray parameter of the nearest intersection at or beyond t_min, if any.
/// The ray direction must be unit length, so the parameter is the range.
std::optional<double> intersect_ray(const Primitive& primitive,
                                    const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction,
                                    double t_min = 1e-9);

/// Casts channels x (360 / hres) rays from the sensor pose (channel-major,
/// azimuth-minor). Hits within [min_range, max_range] become points in the
/// sensor frame, range-perturbed by seeded Gaussian noise. Determinism:
/// the same arguments always produce the same scan.
Scan simulate_scan(const Scene& scene, const SensorPreset& preset,
                   const Pose6& pose, std::uint64_t seed);

struct GroundTruthDrive {
  std::vector<TimedPose> poses;
  Scene scene;
  SensorPreset preset;
  std::uint64_t seed = 0;
};

/// One scan per drive pose, each seeded from the drive seed and the scan
/// index.
std::vector<Scan> simulate_drive(const GroundTruthDrive& drive);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_SIMULATOR_HPP_
