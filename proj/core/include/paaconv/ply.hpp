#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "paaconv/point_cloud.hpp"

namespace paaconv {

// Writes a binary little-endian PLY with float x,y,z and uchar r,g,b per
// vertex, colored from the class palette (labels outside the palette or
// -1 render mid-gray).
void write_ply(const std::string& path, const std::vector<Vec3>& positions,
               const std::vector<int>& labels);

struct PlyHeader {
  std::string format;  // e.g. "binary_little_endian 1.0"
  std::size_t vertex_count = 0;
  std::vector<std::pair<std::string, std::string>> properties;  // (type, name)
  std::size_t header_bytes = 0;
};

// Parses just the header of a PLY file (used by tests and tooling).
PlyHeader read_ply_header(const std::string& path);

}  // namespace paaconv
