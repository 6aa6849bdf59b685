#pragma once

#include <cstdint>
#include <vector>

#include "paaconv/point_cloud.hpp"
#include "paaconv/room_cloud.hpp"

namespace paaconv {

// One training sample: a fixed-size column of points cut from a room.
// Positions are block-relative (offset from the block's own minimum);
// source_indices maps every block point back to its room point, with
// duplicates where the block was upsampled.
struct Block {
  PointCloud cloud;
  std::vector<int> source_indices;
};

struct PartitionOptions {
  double block_size = 1.0;      // xy tile edge, meters
  int points_per_block = 4096;  // every block is resampled to this size
  int min_points = 64;          // sparser tiles are discarded
  std::uint64_t seed = 0;
};

// Cuts the room into an xy grid of block_size tiles anchored at the room
// minimum and resamples every kept tile to exactly points_per_block points
// (without replacement when shrinking; originals plus replacement draws
// when growing). Features are the 9 standard channels: block-relative
// x y z, r g b scaled to [0,1], and the position normalized by the room
// bounding box (zero where the box has no extent). Tiles are processed in
// ascending (tx, ty) order from a single seeded stream, so the result is a
// pure function of room content, options, and seed.
std::vector<Block> partition_blocks(const RoomCloud& room,
                                    const PartitionOptions& options);

// Widens every block's features from 9 to 12 channels by appending the
// room normals, estimating them first (k nearest neighbors, oriented
// toward the viewpoint) when the room has none. Returns the number of
// degenerate neighborhoods that fell back to +z.
int attach_normals(std::vector<Block>& blocks, const RoomCloud& room, int k,
                   const Vec3& viewpoint = Vec3::Zero());

// Canonical point order: ascending by cell coordinate (origin at the
// componentwise position minimum, so the ordering is permutation
// invariant), then by position, then by prior index.
std::vector<int> canonical_order(const std::vector<Vec3>& positions,
                                 double cell_size);

// Canonical block order: the permutation above applied to every per-point
// array. The network applies the same ordering internally; sorting blocks
// up front makes stored data deterministic too.
Block canonical_sort(Block block, double cell_size);

}  // namespace paaconv
