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

#ifndef NDT_ATLAS_CONFIG_HPP_
#define NDT_ATLAS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndt_atlas {

/// Every tunable of the mapping/localization pipelines, as a flat key=value
/// config. Two default sets exist because the protocols differ: mapping gates
/// input scans to [3, 200] m and down-samples with a 0.5 m leaf, localization
/// keeps everything up to 200 m and uses a 2 m leaf.
struct RunConfig {
  double ndt_resolution = 1.0;   // ND voxel edge length [m]
  int max_iterations = 50;       // Newton iteration cap
  double min_range = 3.0;        // input range gate [m]
  double max_range = 200.0;      // input range gate [m]
  double voxel_leaf_size = 0.5;  // input down-sampling leaf [m]
  double min_add_shift = 1.0;    // translation before a scan joins the map [m]
  double error_threshold = 1.0;  // localizer translation-jump gate [m]
  double quality_radius = 1.0;   // MME/MPV neighborhood radius [m]
  std::uint64_t seed = 0;        // simulator seed

  static RunConfig mapping_defaults();
  static RunConfig localization_defaults();
};

/// Thrown when a config file cannot be parsed or validated. The message
/// lists every offending key, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Returns the violated-constraint messages for `config`, empty when valid.
std::vector<std::string> config_violations(const RunConfig& config);

/// Throws ConfigError listing all violations, if any.
void validate_config(const RunConfig& config);

/// Parses `key = value` lines over the given defaults. Lines starting with
/// '#' and blank lines are ignored. Unknown keys and malformed values are
/// errors; all of them are reported together.
RunConfig parse_config_text(const std::string& text, RunConfig defaults);
RunConfig read_config(const std::filesystem::path& path, RunConfig defaults);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_CONFIG_HPP_
