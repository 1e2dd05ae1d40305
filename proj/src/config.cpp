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

#include "ndt_atlas/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ndt_atlas {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, long long& out) {
  std::size_t used = 0;
  try {
    out = std::stoll(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

}  // namespace

RunConfig RunConfig::mapping_defaults() { return RunConfig{}; }

RunConfig RunConfig::localization_defaults() {
  RunConfig c;
  c.min_range = 0.0;
  c.voxel_leaf_size = 2.0;
  return c;
}

std::vector<std::string> config_violations(const RunConfig& c) {
  std::vector<std::string> bad;
  if (!(c.ndt_resolution > 0.0)) {
    bad.push_back("ndt_resolution: must be > 0");
  }
  if (c.max_iterations < 1) {
    bad.push_back("max_iterations: must be >= 1");
  }
  if (!(c.min_range >= 0.0)) {
    bad.push_back("min_range: must be >= 0");
  }
  if (!(c.max_range > c.min_range)) {
    bad.push_back("max_range: must be > min_range");
  }
  if (!(c.voxel_leaf_size > 0.0)) {
    bad.push_back("voxel_leaf_size: must be > 0");
  }
  if (!(c.min_add_shift > 0.0)) {
    bad.push_back("min_add_shift: must be > 0");
  }
  if (!(c.error_threshold > 0.0)) {
    bad.push_back("error_threshold: must be > 0");
  }
  if (!(c.quality_radius > 0.0)) {
    bad.push_back("quality_radius: must be > 0");
  }
  return bad;
}

void validate_config(const RunConfig& config) {
  const std::vector<std::string> bad = config_violations(config);
  if (bad.empty()) {
    return;
  }
  std::string msg = "invalid config:";
  for (const std::string& b : bad) {
    msg += "\n  " + b;
  }
  throw ConfigError(msg);
}

RunConfig parse_config_text(const std::string& text, RunConfig defaults) {
  RunConfig config = defaults;
  std::vector<std::string> errors;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) +
                       ": expected key = value");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    double d = 0.0;
    long long i = 0;
    bool ok = true;
    if (key == "ndt_resolution") {
      ok = parse_double(value, config.ndt_resolution);
    } else if (key == "max_iterations") {
      ok = parse_int(value, i);
      if (ok) config.max_iterations = static_cast<int>(i);
    } else if (key == "min_range") {
      ok = parse_double(value, config.min_range);
    } else if (key == "max_range") {
      ok = parse_double(value, config.max_range);
    } else if (key == "voxel_leaf_size") {
      ok = parse_double(value, config.voxel_leaf_size);
    } else if (key == "min_add_shift") {
      ok = parse_double(value, config.min_add_shift);
    } else if (key == "error_threshold") {
      ok = parse_double(value, config.error_threshold);
    } else if (key == "quality_radius") {
      ok = parse_double(value, config.quality_radius);
    } else if (key == "seed") {
      ok = parse_int(value, i) && i >= 0;
      if (ok) config.seed = static_cast<std::uint64_t>(i);
    } else {
      errors.push_back(key + ": unknown key (line " + std::to_string(line_no) +
                       ")");
      continue;
    }
    if (!ok) {
      errors.push_back(key + ": bad value '" + value + "' (line " +
                       std::to_string(line_no) + ")");
    }
    (void)d;
  }

  for (const std::string& v : config_violations(config)) {
    errors.push_back(v);
  }
  if (!errors.empty()) {
    std::string msg = "config errors:";
    for (const std::string& e : errors) {
      msg += "\n  " + e;
    }
    throw ConfigError(msg);
  }
  return config;
}

RunConfig read_config(const std::filesystem::path& path, RunConfig defaults) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), defaults);
}

}  // namespace ndt_atlas
