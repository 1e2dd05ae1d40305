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

#include "ndt_atlas/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ndt_atlas/log.hpp"

namespace ndt_atlas {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    tokens.push_back(token);
  }
  return tokens;
}

[[noreturn]] void fail(const std::filesystem::path& path, int line_no,
                       const std::string& message) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                   message);
}

double to_double(const std::string& token, const std::filesystem::path& path,
                 int line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    fail(path, line_no, "non-numeric token '" + token + "'");
  }
  return value;
}

struct PcdField {
  std::string name;
  int size = 8;
  char type = 'F';
  int count = 1;
};

struct PcdHeader {
  std::vector<PcdField> fields;
  std::size_t points = 0;
  bool binary = false;
  int data_line = 0;  // line number of the DATA declaration
};

PcdHeader read_pcd_header(std::istream& in, const std::filesystem::path& path,
                          int& line_no) {
  PcdHeader header;
  bool have_fields = false, have_points = false, have_data = false;
  std::size_t width = 0, height = 1;
  bool have_width = false;

  std::string line;
  while (!have_data && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<std::string> tokens = split_ws(line);
    const std::string& keyword = tokens[0];

    if (keyword == "FIELDS") {
      header.fields.clear();
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        header.fields.push_back(PcdField{tokens[i]});
      }
      have_fields = true;
    } else if (keyword == "SIZE" || keyword == "TYPE" || keyword == "COUNT") {
      if (!have_fields) {
        fail(path, line_no, keyword + " before FIELDS");
      }
      if (tokens.size() - 1 != header.fields.size()) {
        fail(path, line_no,
             "field-count mismatch: " + keyword + " lists " +
                 std::to_string(tokens.size() - 1) + " entries for " +
                 std::to_string(header.fields.size()) + " fields");
      }
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        PcdField& f = header.fields[i - 1];
        if (keyword == "SIZE") {
          f.size = static_cast<int>(to_double(tokens[i], path, line_no));
        } else if (keyword == "TYPE") {
          if (tokens[i].size() != 1) {
            fail(path, line_no, "bad TYPE '" + tokens[i] + "'");
          }
          f.type = tokens[i][0];
        } else {
          f.count = static_cast<int>(to_double(tokens[i], path, line_no));
          if (f.count != 1) {
            fail(path, line_no, "COUNT != 1 is not supported");
          }
        }
      }
    } else if (keyword == "WIDTH") {
      if (tokens.size() != 2) fail(path, line_no, "malformed WIDTH");
      width = static_cast<std::size_t>(to_double(tokens[1], path, line_no));
      have_width = true;
    } else if (keyword == "HEIGHT") {
      if (tokens.size() != 2) fail(path, line_no, "malformed HEIGHT");
      height = static_cast<std::size_t>(to_double(tokens[1], path, line_no));
    } else if (keyword == "POINTS") {
      if (tokens.size() != 2) fail(path, line_no, "malformed POINTS");
      header.points =
          static_cast<std::size_t>(to_double(tokens[1], path, line_no));
      have_points = true;
    } else if (keyword == "DATA") {
      if (tokens.size() != 2) fail(path, line_no, "malformed DATA");
      if (tokens[1] == "ascii") {
        header.binary = false;
      } else if (tokens[1] == "binary") {
        header.binary = true;
      } else {
        fail(path, line_no, "unsupported DATA mode '" + tokens[1] + "'");
      }
      header.data_line = line_no;
      have_data = true;
    } else if (keyword == "VERSION" || keyword == "VIEWPOINT") {
      // accepted for PCD compatibility, nothing to keep
    } else {
      log_warn(path.string() + ":" + std::to_string(line_no) +
               ": ignoring unknown header line '" + keyword + "'");
    }
  }

  if (!have_data) {
    fail(path, line_no, "malformed header: missing DATA line");
  }
  if (!have_fields) {
    fail(path, header.data_line, "malformed header: missing FIELDS line");
  }
  if (!have_points) {
    if (!have_width) {
      fail(path, header.data_line, "malformed header: missing POINTS line");
    }
    header.points = width * height;
  } else if (have_width && width * height != header.points) {
    fail(path, header.data_line, "point count mismatch: WIDTH*HEIGHT = " +
                                     std::to_string(width * height) +
                                     " but POINTS = " +
                                     std::to_string(header.points));
  }
  return header;
}

// Column roles resolved from field names. -1 means absent.
struct FieldMap {
  int x = -1, y = -1, z = -1, intensity = -1, ring = -1, timestamp = -1;
};

FieldMap resolve_fields(const PcdHeader& header,
                        const std::filesystem::path& path) {
  FieldMap map;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    const std::string& name = header.fields[i].name;
    const int idx = static_cast<int>(i);
    if (name == "x") {
      map.x = idx;
    } else if (name == "y") {
      map.y = idx;
    } else if (name == "z") {
      map.z = idx;
    } else if (name == "intensity") {
      map.intensity = idx;
    } else if (name == "ring") {
      map.ring = idx;
    } else if (name == "timestamp" || name == "time" || name == "t") {
      map.timestamp = idx;
    } else {
      log_warn(path.string() + ": ignoring unknown field '" + name + "'");
    }
  }
  if (map.x < 0 || map.y < 0 || map.z < 0) {
    throw ParseError(path.string() + ": malformed header: missing x/y/z field");
  }
  if (map.intensity < 0) {
    log_warn(path.string() + ": no intensity field, defaulting to 0");
  }
  return map;
}

Point point_from_values(const std::vector<double>& values, const FieldMap& map,
                        const PcdHeader& header) {
  Point p;
  p.x = values[map.x];
  p.y = values[map.y];
  p.z = values[map.z];
  if (map.intensity >= 0) {
    p.intensity = values[map.intensity];
  }
  if (map.ring >= 0) {
    p.ring = static_cast<std::uint32_t>(values[map.ring]);
  }
  if (map.timestamp >= 0) {
    p.timestamp = values[map.timestamp];
  }
  (void)header;
  return p;
}

double decode_binary_value(const char* bytes, const PcdField& field) {
  switch (field.type) {
    case 'F':
      if (field.size == 4) {
        float f;
        std::memcpy(&f, bytes, 4);
        return static_cast<double>(f);
      } else {
        double d;
        std::memcpy(&d, bytes, 8);
        return d;
      }
    case 'U': {
      std::uint64_t v = 0;
      std::memcpy(&v, bytes, static_cast<std::size_t>(field.size));
      return static_cast<double>(v);
    }
    case 'I': {
      std::int64_t v = 0;
      if (field.size == 1) {
        std::int8_t t;
        std::memcpy(&t, bytes, 1);
        v = t;
      } else if (field.size == 2) {
        std::int16_t t;
        std::memcpy(&t, bytes, 2);
        v = t;
      } else if (field.size == 4) {
        std::int32_t t;
        std::memcpy(&t, bytes, 4);
        v = t;
      } else {
        std::memcpy(&v, bytes, 8);
      }
      return static_cast<double>(v);
    }
    default:
      throw ParseError(std::string("unsupported binary field type '") +
                       field.type + "'");
  }
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

Scan read_scan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open scan file: " + path.string());
  }
  int line_no = 0;
  const PcdHeader header = read_pcd_header(in, path, line_no);
  const FieldMap map = resolve_fields(header, path);

  Scan scan;
  scan.points.reserve(header.points);

  if (!header.binary) {
    std::string line;
    std::vector<double> values(header.fields.size());
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      std::vector<std::string> tokens = split_ws(line);
      if (tokens.empty()) {
        continue;
      }
      if (scan.points.size() == header.points) {
        fail(path, line_no, "point count mismatch: more rows than POINTS = " +
                                std::to_string(header.points));
      }
      if (tokens.size() != header.fields.size()) {
        fail(path, line_no,
             "field-count mismatch: got " + std::to_string(tokens.size()) +
                 " values, expected " + std::to_string(header.fields.size()));
      }
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        values[i] = to_double(tokens[i], path, line_no);
      }
      scan.points.push_back(point_from_values(values, map, header));
    }
    if (scan.points.size() != header.points) {
      fail(path, line_no,
           "point count mismatch: got " + std::to_string(scan.points.size()) +
               " rows for POINTS = " + std::to_string(header.points));
    }
  } else {
    std::size_t record_size = 0;
    for (const PcdField& f : header.fields) {
      record_size += static_cast<std::size_t>(f.size);
    }
    std::vector<char> record(record_size);
    std::vector<double> values(header.fields.size());
    for (std::size_t n = 0; n < header.points; ++n) {
      in.read(record.data(), static_cast<std::streamsize>(record_size));
      if (in.gcount() != static_cast<std::streamsize>(record_size)) {
        fail(path, header.data_line,
             "point count mismatch: binary payload ends after " +
                 std::to_string(n) + " of " + std::to_string(header.points) +
                 " points");
      }
      std::size_t offset = 0;
      for (std::size_t i = 0; i < header.fields.size(); ++i) {
        values[i] = decode_binary_value(record.data() + offset,
                                        header.fields[i]);
        offset += static_cast<std::size_t>(header.fields[i].size);
      }
      scan.points.push_back(point_from_values(values, map, header));
    }
  }
  return scan;
}

void write_scan(const Scan& scan, const std::filesystem::path& path,
                ScanFormat format) {
  const bool all_ring =
      !scan.points.empty() &&
      std::all_of(scan.points.begin(), scan.points.end(),
                  [](const Point& p) { return p.ring.has_value(); });
  const bool all_stamp =
      !scan.points.empty() &&
      std::all_of(scan.points.begin(), scan.points.end(),
                  [](const Point& p) { return p.timestamp.has_value(); });
  const bool any_ring = std::any_of(scan.points.begin(), scan.points.end(),
                                    [](const Point& p) {
                                      return p.ring.has_value();
                                    });
  const bool any_stamp = std::any_of(scan.points.begin(), scan.points.end(),
                                     [](const Point& p) {
                                       return p.timestamp.has_value();
                                     });
  if (any_ring && !all_ring) {
    log_warn(path.string() + ": ring present on only some points, dropping");
  }
  if (any_stamp && !all_stamp) {
    log_warn(path.string() +
             ": timestamp present on only some points, dropping");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot open for writing: " + path.string());
  }

  std::string fields = "x y z intensity";
  std::string sizes = "8 8 8 8";
  std::string types = "F F F F";
  std::string counts = "1 1 1 1";
  if (all_ring) {
    fields += " ring";
    sizes += " 4";
    types += " U";
    counts += " 1";
  }
  if (all_stamp) {
    fields += " timestamp";
    sizes += " 8";
    types += " F";
    counts += " 1";
  }

  const std::size_t n = scan.points.size();
  out << "# .PCD v0.7 - Point Cloud Data file format\n"
      << "VERSION 0.7\n"
      << "FIELDS " << fields << "\n"
      << "SIZE " << sizes << "\n"
      << "TYPE " << types << "\n"
      << "COUNT " << counts << "\n"
      << "WIDTH " << n << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << n << "\n"
      << "DATA " << (format == ScanFormat::kAscii ? "ascii" : "binary")
      << "\n";

  if (format == ScanFormat::kAscii) {
    for (const Point& p : scan.points) {
      out << format_double(p.x) << ' ' << format_double(p.y) << ' '
          << format_double(p.z) << ' ' << format_double(p.intensity);
      if (all_ring) {
        out << ' ' << *p.ring;
      }
      if (all_stamp) {
        out << ' ' << format_double(*p.timestamp);
      }
      out << '\n';
    }
  } else {
    auto put_double = [&out](double v) {
      char bytes[8];
      std::memcpy(bytes, &v, 8);
      out.write(bytes, 8);
    };
    for (const Point& p : scan.points) {
      put_double(p.x);
      put_double(p.y);
      put_double(p.z);
      put_double(p.intensity);
      if (all_ring) {
        const std::uint32_t r = *p.ring;
        char bytes[4];
        std::memcpy(bytes, &r, 4);
        out.write(bytes, 4);
      }
      if (all_stamp) {
        put_double(*p.timestamp);
      }
    }
  }
  if (!out) {
    throw ParseError("write failed: " + path.string());
  }
}

std::vector<TimedPose> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open trajectory file: " + path.string());
  }
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty trajectory file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }

  // Header: required columns may appear in any order.
  std::vector<std::string> columns;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      columns.push_back(col);
    }
  }
  const std::vector<std::string> required = {"stamp", "x",     "y",  "z",
                                             "roll",  "pitch", "yaw"};
  std::vector<int> index(required.size(), -1);
  for (std::size_t r = 0; r < required.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == required[r]) {
        index[r] = static_cast<int>(c);
        break;
      }
    }
    if (index[r] < 0) {
      throw ParseError(path.string() + ": missing column '" + required[r] +
                       "'");
    }
  }

  std::vector<TimedPose> trajectory;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != columns.size()) {
      fail(path, line_no,
           "field-count mismatch: got " + std::to_string(cells.size()) +
               " cells, expected " + std::to_string(columns.size()));
    }
    auto value = [&](int r) {
      return to_double(cells[static_cast<std::size_t>(index[r])], path,
                       line_no);
    };
    TimedPose tp;
    tp.stamp = value(0);
    tp.pose.x = value(1);
    tp.pose.y = value(2);
    tp.pose.z = value(3);
    tp.pose.roll = value(4);
    tp.pose.pitch = value(5);
    tp.pose.yaw = value(6);
    trajectory.push_back(tp);
  }
  return trajectory;
}

void write_trajectory(const std::vector<TimedPose>& trajectory,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open for writing: " + path.string());
  }
  out << "stamp,x,y,z,roll,pitch,yaw\n";
  for (const TimedPose& tp : trajectory) {
    out << format_double(tp.stamp) << ',' << format_double(tp.pose.x) << ','
        << format_double(tp.pose.y) << ',' << format_double(tp.pose.z) << ','
        << format_double(tp.pose.roll) << ',' << format_double(tp.pose.pitch)
        << ',' << format_double(tp.pose.yaw) << '\n';
  }
  if (!out) {
    throw ParseError("write failed: " + path.string());
  }
}

}  // namespace ndt_atlas
