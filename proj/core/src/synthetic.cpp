#include "paaconv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Geometry>

#include "paaconv/errors.hpp"
#include "paaconv/palette.hpp"
#include "paaconv/rng.hpp"

namespace paaconv {

const std::array<std::array<std::uint8_t, 3>, kPaletteSize>& class_palette() {
  static const std::array<std::array<std::uint8_t, 3>, kPaletteSize> palette = {{
      {230, 25, 75},    // 0 floor
      {60, 180, 75},    // 1 ceiling
      {255, 225, 25},   // 2 walls
      {0, 130, 200},    // 3
      {245, 130, 48},   // 4
      {145, 30, 180},   // 5
      {70, 240, 240},   // 6
      {240, 50, 230},   // 7
      {210, 245, 60},   // 8
      {250, 190, 212},  // 9
      {0, 128, 128},    // 10
      {220, 190, 255},  // 11
      {128, 128, 0},    // 12
  }};
  return palette;
}

std::array<std::uint8_t, 3> color_for_label(int label) {
  if (label < 0 || label >= kPaletteSize) return {128, 128, 128};
  return class_palette()[label];
}

void RoomSpec::validate() const {
  if (!(width > 0.0) || !(depth > 0.0) || !(height > 0.0) ||
      !std::isfinite(width) || !std::isfinite(depth) || !std::isfinite(height)) {
    throw ConfigError("synthetic room: dimensions must be positive");
  }
  if (points < 0) throw ConfigError("synthetic room: points must be >= 0");
  if (classes < 1 || classes > kPaletteSize) {
    throw ConfigError("synthetic room: classes must be in [1, " +
                      std::to_string(kPaletteSize) + "]");
  }
  if (objects < 0) throw ConfigError("synthetic room: objects must be >= 0");
  if (classes >= 4 && objects < 1 && !floor_only) {
    throw ConfigError(
        "synthetic room: classes >= 4 need at least one object to carry the "
        "extra labels");
  }
  if (noise < 0.0 || !std::isfinite(noise)) {
    throw ConfigError("synthetic room: noise must be >= 0");
  }
}

namespace {

// Parallelogram patch: base corner plus two edge vectors.
struct Patch {
  Vec3 base;
  Vec3 edge_u;
  Vec3 edge_v;
  double area() const { return edge_u.cross(edge_v).norm(); }
};

}  // namespace

RoomCloud generate_synthetic_room(const RoomSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const double w = spec.width, d = spec.depth, h = spec.height;
  const int classes = spec.floor_only ? 1 : spec.classes;

  // Patches per class id.
  std::vector<std::vector<Patch>> patches(classes);
  patches[0].push_back({{0, 0, 0}, {w, 0, 0}, {0, d, 0}});  // floor
  if (classes > 1) {
    patches[1].push_back({{0, 0, h}, {w, 0, 0}, {0, d, 0}});  // ceiling
  }
  if (classes > 2) {
    patches[2].push_back({{0, 0, 0}, {w, 0, 0}, {0, 0, h}});
    patches[2].push_back({{0, d, 0}, {w, 0, 0}, {0, 0, h}});
    patches[2].push_back({{0, 0, 0}, {0, d, 0}, {0, 0, h}});
    patches[2].push_back({{w, 0, 0}, {0, d, 0}, {0, 0, h}});
  }
  if (classes > 3) {
    for (int obj = 0; obj < spec.objects; ++obj) {
      const int label = 3 + obj % (classes - 3);
      const double sx = rng.uniform(0.3, 0.8) * std::min(1.0, w / 2.0);
      const double sy = rng.uniform(0.3, 0.8) * std::min(1.0, d / 2.0);
      const double sz = rng.uniform(0.3, 0.9) * std::min(1.0, h / 2.0);
      double cx = rng.uniform(0.15 * w, 0.85 * w);
      double cy = rng.uniform(0.15 * d, 0.85 * d);
      cx = std::clamp(cx, sx / 2.0, w - sx / 2.0);
      cy = std::clamp(cy, sy / 2.0, d - sy / 2.0);
      const Vec3 lo(cx - sx / 2.0, cy - sy / 2.0, 0.0);
      // Five visible faces of a box sitting on the floor.
      patches[label].push_back({{lo.x(), lo.y(), sz}, {sx, 0, 0}, {0, sy, 0}});
      patches[label].push_back({{lo.x(), lo.y(), 0}, {sx, 0, 0}, {0, 0, sz}});
      patches[label].push_back({{lo.x(), lo.y() + sy, 0}, {sx, 0, 0}, {0, 0, sz}});
      patches[label].push_back({{lo.x(), lo.y(), 0}, {0, sy, 0}, {0, 0, sz}});
      patches[label].push_back({{lo.x() + sx, lo.y(), 0}, {0, sy, 0}, {0, 0, sz}});
    }
  }

  // Cumulative areas per class for the weighted patch pick.
  std::vector<std::vector<double>> cumulative(classes);
  for (int c = 0; c < classes; ++c) {
    double running = 0.0;
    for (const Patch& p : patches[c]) {
      running += p.area();
      cumulative[c].push_back(running);
    }
  }

  RoomCloud room;
  room.positions.reserve(spec.points);
  room.colors.reserve(spec.points);
  room.labels.reserve(spec.points);

  for (int i = 0; i < spec.points; ++i) {
    const int label = spec.floor_only ? 0 : rng.below_int(classes);
    const auto& cum = cumulative[label];
    const double pick = rng.uniform01() * cum.back();
    const std::size_t which =
        std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
    const Patch& patch =
        patches[label][std::min(which, patches[label].size() - 1)];

    Vec3 p = patch.base + rng.uniform01() * patch.edge_u +
             rng.uniform01() * patch.edge_v;
    if (spec.noise > 0.0) {
      p.x() += rng.normal(0.0, spec.noise);
      p.y() += rng.normal(0.0, spec.noise);
      p.z() += rng.normal(0.0, spec.noise);
    }

    const auto color = class_palette()[label];
    room.positions.push_back(p);
    room.colors.push_back({color[0], color[1], color[2]});
    room.labels.push_back(label);
  }

  room.recompute_bounds();
  return room;
}

}  // namespace paaconv
