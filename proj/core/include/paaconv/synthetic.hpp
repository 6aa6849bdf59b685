#pragma once

#include <cstdint>

#include "paaconv/room_cloud.hpp"

namespace paaconv {

// Synthetic room: points sampled on the surfaces of an axis-aligned room
// shell plus box "furniture", colored by class from the fixed palette.
// Class ids: 0 floor, 1 ceiling, 2 walls, 3.. boxes. With `classes` below
// 4 the later surface kinds are simply absent; box objects only appear
// when classes >= 4. Labels are drawn uniformly over the class ids, so
// every class receives an equal share of points in expectation.
struct RoomSpec {
  double width = 4.0;    // x extent, meters
  double depth = 3.0;    // y extent
  double height = 2.5;   // z extent
  int points = 20000;
  int classes = 4;       // in [1, 13]
  int objects = 3;       // box count, labels cycle over ids 3..classes-1
  double noise = 0.005;  // gaussian jitter sigma, meters
  std::uint64_t seed = 0;
  bool floor_only = false;  // every point on the floor plane, class 0

  void validate() const;  // throws ConfigError
};

RoomCloud generate_synthetic_room(const RoomSpec& spec);

}  // namespace paaconv
