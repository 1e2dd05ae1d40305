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

#ifndef NDT_ATLAS_IO_HPP_
#define NDT_ATLAS_IO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndt_atlas/geometry.hpp"

namespace ndt_atlas {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

enum class ScanFormat { kAscii, kBinary };

/// Reads a PCD scan (ASCII or packed little-endian binary, per the DATA
/// header). Fields x, y, z are required; intensity, ring, timestamp are
/// mapped when present; any other field is skipped with a warning. A ring
/// or timestamp column missing from the file leaves those marked missing
/// on every point.
Scan read_scan(const std::filesystem::path& path);

/// Writes a PCD scan. The ring (timestamp) column is emitted only when
/// every point carries it; mixed presence drops the column with a warning.
/// ASCII floats carry 9 significant digits; the binary variant stores
/// doubles and round-trips exactly.
void write_scan(const Scan& scan, const std::filesystem::path& path,
                ScanFormat format = ScanFormat::kAscii);

/// Trajectory CSV with header `stamp,x,y,z,roll,pitch,yaw` and 9
/// significant digits per value.
std::vector<TimedPose> read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::vector<TimedPose>& trajectory,
                      const std::filesystem::path& path);

/// Formats a double with 9 significant digits, the project-wide text
/// precision.
std::string format_double(double value);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_IO_HPP_
