#include "paaconv/ply.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "paaconv/errors.hpp"
#include "paaconv/palette.hpp"

namespace paaconv {

namespace {

void put_f32(std::ostream& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 4);
}

}  // namespace

void write_ply(const std::string& path, const std::vector<Vec3>& positions,
               const std::vector<int>& labels) {
  if (positions.size() != labels.size()) {
    throw InvalidInputError("write_ply: positions and labels differ in size");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_ply: cannot open for writing: " + path);

  out << "ply\n"
      << "format binary_little_endian 1.0\n"
      << "element vertex " << positions.size() << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "property uchar red\n"
      << "property uchar green\n"
      << "property uchar blue\n"
      << "end_header\n";

  for (std::size_t i = 0; i < positions.size(); ++i) {
    put_f32(out, static_cast<float>(positions[i].x()));
    put_f32(out, static_cast<float>(positions[i].y()));
    put_f32(out, static_cast<float>(positions[i].z()));
    const auto color = color_for_label(labels[i]);
    const char rgb[3] = {static_cast<char>(color[0]),
                         static_cast<char>(color[1]),
                         static_cast<char>(color[2])};
    out.write(rgb, 3);
  }
  if (!out.flush()) throw IoError("write_ply: write failed: " + path);
}

PlyHeader read_ply_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_ply_header: cannot open: " + path);

  PlyHeader header;
  std::string line;
  std::size_t consumed = 0;
  bool first = true;
  while (std::getline(in, line)) {
    consumed += line.size() + 1;  // getline swallows the newline
    if (first) {
      if (line != "ply") throw ParseError("ply: missing magic line");
      first = false;
      continue;
    }
    std::istringstream fields(line);
    std::string keyword;
    fields >> keyword;
    if (keyword == "format") {
      std::string rest;
      std::getline(fields, rest);
      header.format = rest.empty() ? "" : rest.substr(1);
    } else if (keyword == "element") {
      std::string name;
      std::size_t count = 0;
      fields >> name >> count;
      if (name != "vertex") throw ParseError("ply: unsupported element " + name);
      header.vertex_count = count;
    } else if (keyword == "property") {
      std::string type, name;
      fields >> type >> name;
      header.properties.emplace_back(type, name);
    } else if (keyword == "comment") {
      continue;
    } else if (keyword == "end_header") {
      header.header_bytes = consumed;
      return header;
    } else {
      throw ParseError("ply: unexpected header line: " + line);
    }
  }
  throw ParseError("ply: header ended before end_header");
}

}  // namespace paaconv
