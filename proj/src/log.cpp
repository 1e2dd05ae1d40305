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

#include "ndt_atlas/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace ndt_atlas {
namespace {

LogLevel parse_level(const char* text) {
  if (text == nullptr) {
    return LogLevel::kWarn;
  }
  const std::string s(text);
  if (s == "quiet") return LogLevel::kQuiet;
  if (s == "error") return LogLevel::kError;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

LogLevel& level_storage() {
  static LogLevel level = parse_level(std::getenv("NDT_ATLAS_LOG"));
  return level;
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void emit(LogLevel level, const char* tag, const std::string& message) {
  if (level > log_level()) {
    return;
  }
  std::lock_guard<std::mutex> lock(log_mutex());
  std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

}  // namespace

LogLevel log_level() { return level_storage(); }

void set_log_level(LogLevel level) { level_storage() = level; }

void log_error(const std::string& message) {
  emit(LogLevel::kError, "error", message);
}

void log_warn(const std::string& message) {
  emit(LogLevel::kWarn, "warn", message);
}

void log_info(const std::string& message) {
  emit(LogLevel::kInfo, "info", message);
}

void log_debug(const std::string& message) {
  emit(LogLevel::kDebug, "debug", message);
}

}  // namespace ndt_atlas
