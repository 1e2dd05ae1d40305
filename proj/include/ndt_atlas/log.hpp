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

#ifndef NDT_ATLAS_LOG_HPP_
#define NDT_ATLAS_LOG_HPP_

#include <string>

namespace ndt_atlas {

// Verbosity is controlled by the NDT_ATLAS_LOG environment variable:
// quiet | error | warn | info | debug. Default is warn.
enum class LogLevel { kQuiet = 0, kError, kWarn, kInfo, kDebug };

LogLevel log_level();
void set_log_level(LogLevel level);

void log_error(const std::string& message);
void log_warn(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_LOG_HPP_
