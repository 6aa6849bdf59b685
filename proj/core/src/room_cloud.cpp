#include "paaconv/room_cloud.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "paaconv/errors.hpp"

namespace paaconv {

void RoomCloud::recompute_bounds() {
  if (positions.empty()) {
    bbox_min = Vec3::Zero();
    bbox_max = Vec3::Zero();
    return;
  }
  bbox_min = positions[0];
  bbox_max = positions[0];
  for (const Vec3& p : positions) {
    bbox_min = bbox_min.cwiseMin(p);
    bbox_max = bbox_max.cwiseMax(p);
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

[[noreturn]] void fail(long line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& tok, long line_no, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() ||
      !std::isfinite(value)) {
    fail(line_no, std::string("bad ") + what + " '" + tok + "'");
  }
  return value;
}

int parse_int(const std::string& tok, long line_no, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(line_no, std::string("bad ") + what + " '" + tok + "'");
  }
  return value;
}

}  // namespace

RoomCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_cloud: cannot open: " + path);

  RoomCloud room;
  std::string line;
  long line_no = 0;
  std::size_t arity = 0;  // 0 until the first data line fixes it

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;

    const auto fields = split_fields(line);
    if (fields.size() != 7 && fields.size() != 10) {
      fail(line_no, "expected 7 or 10 fields, got " +
                        std::to_string(fields.size()));
    }
    if (arity == 0) {
      arity = fields.size();
    } else if (arity != fields.size()) {
      fail(line_no,
           "field count changed mid-file; normals must appear on every line "
           "or on none");
    }

    Vec3 pos(parse_double(fields[0], line_no, "x"),
             parse_double(fields[1], line_no, "y"),
             parse_double(fields[2], line_no, "z"));
    std::array<int, 3> color;
    for (int c = 0; c < 3; ++c) {
      color[c] = parse_int(fields[3 + c], line_no, "color");
      if (color[c] < 0 || color[c] > 255) {
        fail(line_no, "color out of range [0,255]");
      }
    }
    if (fields.size() == 10) {
      room.normals.emplace_back(parse_double(fields[6], line_no, "nx"),
                                parse_double(fields[7], line_no, "ny"),
                                parse_double(fields[8], line_no, "nz"));
    }
    const int label = parse_int(fields.back(), line_no, "label");
    if (label < -1) fail(line_no, "label must be >= -1");

    room.positions.push_back(pos);
    room.colors.push_back(color);
    room.labels.push_back(label);
  }

  room.recompute_bounds();
  return room;
}

void save_cloud(const std::string& path, const RoomCloud& room) {
  if (room.has_normals() &&
      room.normals.size() != room.positions.size()) {
    throw InvalidInputError("save_cloud: normal count != point count");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("save_cloud: cannot open for writing: " + path);

  char buf[320];
  for (int i = 0; i < room.size(); ++i) {
    const Vec3& p = room.positions[i];
    const auto& c = room.colors[i];
    if (room.has_normals()) {
      const Vec3& n = room.normals[i];
      std::snprintf(buf, sizeof(buf),
                    "%.17g %.17g %.17g %d %d %d %.17g %.17g %.17g %d\n", p.x(),
                    p.y(), p.z(), c[0], c[1], c[2], n.x(), n.y(), n.z(),
                    room.labels[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %d %d %d %d\n", p.x(),
                    p.y(), p.z(), c[0], c[1], c[2], room.labels[i]);
    }
    out << buf;
  }
  if (!out.flush()) throw IoError("save_cloud: write failed: " + path);
}

}  // namespace paaconv
