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

#include "ndt_atlas/simulator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ndt_atlas/io.hpp"

namespace ndt_atlas {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::uint64_t splitmix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

double parse_dimension(const std::string& token, const std::string& origin,
                       int line_no) {
  if (token == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    throw ParseError(origin + ":" + std::to_string(line_no) +
                     ": non-numeric token '" + token + "'");
  }
  return value;
}

}  // namespace

std::vector<double> SensorPreset::beam_elevations() const {
  std::vector<double> elevations;
  if (!elevations_deg.empty()) {
    elevations.reserve(elevations_deg.size());
    for (double e : elevations_deg) {
      elevations.push_back(e * kDegToRad);
    }
    return elevations;
  }
  // Uniform spacing centered on the horizon.
  const double span = vres_deg * static_cast<double>(channels - 1);
  const double lowest = -span / 2.0;
  elevations.reserve(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    elevations.push_back((lowest + vres_deg * c) * kDegToRad);
  }
  return elevations;
}

int SensorPreset::rays_per_revolution() const {
  return static_cast<int>(std::lround(360.0 / hres_deg));
}

void SensorPreset::validate() const {
  if (channels < 1) {
    throw std::invalid_argument(name + ": channels must be >= 1");
  }
  if (!(min_range > 0.0) || !(max_range > min_range)) {
    throw std::invalid_argument(name + ": need 0 < min_range < max_range");
  }
  if (!(hres_deg > 0.0) || !(vres_deg > 0.0)) {
    throw std::invalid_argument(name + ": resolutions must be > 0");
  }
  if (range_sigma < 0.0) {
    throw std::invalid_argument(name + ": range_sigma must be >= 0");
  }
  if (elevations_deg.empty()) {
    if (vres_deg * (channels - 1) > vfov_deg + 1e-9) {
      throw std::invalid_argument(name +
                                  ": beams at vres_deg spacing exceed vfov_deg");
    }
  } else if (elevations_deg.size() != static_cast<std::size_t>(channels)) {
    throw std::invalid_argument(name + ": elevation table size != channels");
  }
}

const std::vector<SensorPreset>& SensorPreset::builtin() {
  // Datasheet-style entries. Notes: several sensors have variable beam
  // spacing; vres_deg here is the finest spacing and the uniform layout
  // approximates the dense region. OS1-64 lists 0.53 deg in its sheet,
  // which is 33.2/63 rounded up; the exact quotient is used so the beams
  // fit the field of view. Some sheets give range-dependent precision;
  // a single representative sigma is kept. VLS-128 min range is not
  // published in the same table; 0.1 m is a conservative stand-in.
  static const std::vector<SensorPreset> presets = {
      {"VLS-128AP", 128, 40.0, 0.11, 0.2, 245.0, 0.1, 0.03, {}},
      {"VLS-128", 128, 40.0, 0.11, 0.2, 300.0, 0.1, 0.03, {}},
      {"HDL-64S2", 64, 26.9, 0.33, 0.2, 120.0, 3.0, 0.02, {}},
      {"HDL-32E", 32, 41.33, 1.33, 0.2, 100.0, 2.0, 0.02, {}},
      {"VLP-32C", 32, 40.0, 0.33, 0.2, 200.0, 1.0, 0.03, {}},
      {"VLP-16", 16, 30.0, 2.0, 0.2, 100.0, 1.0, 0.03, {}},
      {"Pandar-64", 64, 40.0, 0.167, 0.2, 200.0, 0.3, 0.02, {}},
      {"Pandar-40P", 40, 40.0, 0.33, 0.2, 200.0, 0.3, 0.02, {}},
      {"OS1-64", 64, 33.2, 33.2 / 63.0, 0.2, 120.0, 0.8, 0.03, {}},
      {"RS-Lidar32", 32, 40.0, 0.33, 0.2, 200.0, 0.4, 0.03, {}},
  };
  return presets;
}

SensorPreset SensorPreset::by_name(const std::string& name) {
  for (const SensorPreset& p : builtin()) {
    if (p.name == name) {
      return p;
    }
  }
  throw std::invalid_argument("unknown sensor preset '" + name + "'");
}

SensorPreset SensorPreset::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open preset file: " + path.string());
  }
  SensorPreset preset;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      preset.name = value;
    } else if (key == "channels") {
      preset.channels = static_cast<int>(
          parse_dimension(value, path.string(), line_no));
    } else if (key == "vfov_deg") {
      preset.vfov_deg = parse_dimension(value, path.string(), line_no);
    } else if (key == "vres_deg") {
      preset.vres_deg = parse_dimension(value, path.string(), line_no);
    } else if (key == "hres_deg") {
      preset.hres_deg = parse_dimension(value, path.string(), line_no);
    } else if (key == "max_range") {
      preset.max_range = parse_dimension(value, path.string(), line_no);
    } else if (key == "min_range") {
      preset.min_range = parse_dimension(value, path.string(), line_no);
    } else if (key == "range_sigma") {
      preset.range_sigma = parse_dimension(value, path.string(), line_no);
    } else if (key == "elevations_deg") {
      preset.elevations_deg.clear();
      std::istringstream es(value);
      std::string cell;
      while (std::getline(es, cell, ',')) {
        preset.elevations_deg.push_back(
            parse_dimension(trim(cell), path.string(), line_no));
      }
    } else {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": unknown preset key '" + key + "'");
    }
  }
  preset.validate();
  return preset;
}

Scene Scene::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open scene file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str(), path.string());
}

Scene Scene::from_text(const std::string& text, const std::string& origin) {
  Scene scene;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string token;
    while (ls >> token) {
      tokens.push_back(token);
    }
    if (tokens.empty() || tokens[0][0] == '#') {
      continue;
    }
    auto number = [&](std::size_t i) {
      if (i >= tokens.size()) {
        throw ParseError(origin + ":" + std::to_string(line_no) +
                         ": too few values for '" + tokens[0] + "'");
      }
      return parse_dimension(tokens[i], origin, line_no);
    };
    if (tokens[0] == "plane") {
      PlaneSurface s;
      s.pose = {number(1), number(2), number(3),
                number(4), number(5), number(6)};
      s.half_x = number(7);
      s.half_y = number(8);
      scene.primitives.emplace_back(s);
    } else if (tokens[0] == "box") {
      BoxSurface s;
      s.pose = {number(1), number(2), number(3),
                number(4), number(5), number(6)};
      s.half_extents = {number(7), number(8), number(9)};
      scene.primitives.emplace_back(s);
    } else if (tokens[0] == "cylinder") {
      CylinderSurface s;
      s.center = {number(1), number(2), number(3)};
      s.radius = number(4);
      s.half_height = number(5);
      scene.primitives.emplace_back(s);
    } else {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": unknown primitive '" + tokens[0] + "'");
    }
  }
  if (scene.primitives.empty()) {
    throw ParseError(origin + ": scene has no primitives");
  }
  return scene;
}

std::optional<double> intersect_ray(const Primitive& primitive,
                                    const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction,
                                    double t_min) {
  if (const auto* plane = std::get_if<PlaneSurface>(&primitive)) {
    const RigidTransform t = to_matrix(plane->pose);
    const Eigen::Vector3d o = t.rotation.transpose() * (origin - t.translation);
    const Eigen::Vector3d d = t.rotation.transpose() * direction;
    if (std::abs(d.z()) < 1e-15) {
      return std::nullopt;
    }
    const double s = -o.z() / d.z();
    if (s < t_min) {
      return std::nullopt;
    }
    const Eigen::Vector3d hit = o + s * d;
    if (std::abs(hit.x()) <= plane->half_x &&
        std::abs(hit.y()) <= plane->half_y) {
      return s;
    }
    return std::nullopt;
  }
  if (const auto* box = std::get_if<BoxSurface>(&primitive)) {
    const RigidTransform t = to_matrix(box->pose);
    const Eigen::Vector3d o = t.rotation.transpose() * (origin - t.translation);
    const Eigen::Vector3d d = t.rotation.transpose() * direction;
    double enter = -std::numeric_limits<double>::infinity();
    double exit = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
      const double h = box->half_extents[axis];
      if (std::abs(d[axis]) < 1e-15) {
        if (std::abs(o[axis]) > h) {
          return std::nullopt;
        }
        continue;
      }
      double t1 = (-h - o[axis]) / d[axis];
      double t2 = (h - o[axis]) / d[axis];
      if (t1 > t2) {
        std::swap(t1, t2);
      }
      enter = std::max(enter, t1);
      exit = std::min(exit, t2);
      if (enter > exit) {
        return std::nullopt;
      }
    }
    if (enter >= t_min) {
      return enter;
    }
    if (exit >= t_min) {
      return exit;  // origin inside the box
    }
    return std::nullopt;
  }
  const auto& cylinder = std::get<CylinderSurface>(primitive);
  const double ox = origin.x() - cylinder.center.x();
  const double oy = origin.y() - cylinder.center.y();
  const double a = direction.x() * direction.x() +
                   direction.y() * direction.y();
  if (a < 1e-18) {
    return std::nullopt;  // vertical ray, lateral surface only
  }
  const double b = 2.0 * (ox * direction.x() + oy * direction.y());
  const double c = ox * ox + oy * oy - cylinder.radius * cylinder.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double sq = std::sqrt(disc);
  for (const double s : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    if (s >= t_min) {
      const double z = origin.z() + s * direction.z() - cylinder.center.z();
      if (std::abs(z) <= cylinder.half_height) {
        return s;
      }
    }
  }
  return std::nullopt;
}

Scan simulate_scan(const Scene& scene, const SensorPreset& preset,
                   const Pose6& pose, std::uint64_t seed) {
  preset.validate();
  const RigidTransform transform = to_matrix(pose);
  const std::vector<double> elevations = preset.beam_elevations();
  const int azimuth_steps = preset.rays_per_revolution();
  const double hres_rad = preset.hres_deg * kDegToRad;

  std::mt19937_64 engine(splitmix64(seed));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  Scan scan;
  scan.frame_id = preset.name;
  scan.stamp = 0.0;
  scan.points.reserve(elevations.size() *
                      static_cast<std::size_t>(azimuth_steps) / 4);

  for (std::size_t channel = 0; channel < elevations.size(); ++channel) {
    const double elevation = elevations[channel];
    const double ce = std::cos(elevation);
    const double se = std::sin(elevation);
    for (int step = 0; step < azimuth_steps; ++step) {
      const double azimuth = hres_rad * step;
      const Eigen::Vector3d dir_sensor(ce * std::cos(azimuth),
                                       ce * std::sin(azimuth), se);
      const Eigen::Vector3d dir_world = transform.rotation * dir_sensor;

      double nearest = std::numeric_limits<double>::infinity();
      for (const Primitive& primitive : scene.primitives) {
        if (const auto hit =
                intersect_ray(primitive, transform.translation, dir_world)) {
          nearest = std::min(nearest, *hit);
        }
      }
      if (nearest < preset.min_range || nearest > preset.max_range) {
        continue;
      }
      const double range = nearest + preset.range_sigma * unit_normal(engine);
      const Eigen::Vector3d p = range * dir_sensor;
      Point point;
      point.x = p.x();
      point.y = p.y();
      point.z = p.z();
      point.intensity = 100.0;
      point.ring = static_cast<std::uint32_t>(channel);
      point.timestamp = scan.stamp;
      scan.points.push_back(point);
    }
  }
  return scan;
}

std::vector<Scan> simulate_drive(const GroundTruthDrive& drive) {
  for (std::size_t i = 1; i < drive.poses.size(); ++i) {
    if (!(drive.poses[i].stamp > drive.poses[i - 1].stamp)) {
      throw std::invalid_argument(
          "simulate_drive: stamps must be strictly increasing");
    }
  }
  std::vector<Scan> scans;
  scans.reserve(drive.poses.size());
  for (std::size_t i = 0; i < drive.poses.size(); ++i) {
    const std::uint64_t scan_seed = splitmix64(drive.seed + i + 1);
    Scan scan = simulate_scan(drive.scene, drive.preset, drive.poses[i].pose,
                              scan_seed);
    scan.stamp = drive.poses[i].stamp;
    for (Point& p : scan.points) {
      p.timestamp = scan.stamp;
    }
    scans.push_back(std::move(scan));
  }
  return scans;
}

}  // namespace ndt_atlas
