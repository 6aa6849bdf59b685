#pragma once

#include <array>
#include <string>
#include <vector>

#include "paaconv/point_cloud.hpp"

namespace paaconv {

// A whole room as loaded from disk: positions in meters, 8-bit colors,
// labels (-1 = unlabeled), optional per-point normals.
struct RoomCloud {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> colors;
  std::vector<int> labels;
  std::vector<Vec3> normals;  // empty or one per point

  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Zero();

  int size() const { return static_cast<int>(positions.size()); }
  bool has_normals() const { return !normals.empty(); }
  void recompute_bounds();
};

// ASCII room format, one point per line:
//
//   x y z r g b label
//   x y z r g b nx ny nz label
//
// Lines are whitespace-separated; lines starting with '#' and blank lines
// are skipped. r,g,b are integers in [0,255]; label is an integer >= -1
// (-1 = unlabeled). Either every line carries normals or none does.
// load throws IoError when the file cannot be opened and ParseError (with
// the 1-based line number) for malformed content.
RoomCloud load_cloud(const std::string& path);
void save_cloud(const std::string& path, const RoomCloud& room);

}  // namespace paaconv
