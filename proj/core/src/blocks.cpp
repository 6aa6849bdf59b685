#include "paaconv/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "paaconv/errors.hpp"
#include "paaconv/normals.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/voxel_grid.hpp"

namespace paaconv {

std::vector<int> canonical_order(const std::vector<Vec3>& positions,
                                 double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidArgumentError("canonical_order: cell_size must be positive");
  }
  const int n = static_cast<int>(positions.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n == 0) return order;

  Vec3 origin = positions[0];
  for (const Vec3& p : positions) origin = origin.cwiseMin(p);

  std::vector<CellCoord> cells(n);
  for (int i = 0; i < n; ++i) {
    cells[i] = {static_cast<std::int64_t>(
                    std::floor((positions[i].x() - origin.x()) / cell_size)),
                static_cast<std::int64_t>(
                    std::floor((positions[i].y() - origin.y()) / cell_size)),
                static_cast<std::int64_t>(
                    std::floor((positions[i].z() - origin.z()) / cell_size))};
  }

  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cells[a] != cells[b]) return cells[a] < cells[b];
    const Vec3& pa = positions[a];
    const Vec3& pb = positions[b];
    if (pa.x() != pb.x()) return pa.x() < pb.x();
    if (pa.y() != pb.y()) return pa.y() < pb.y();
    if (pa.z() != pb.z()) return pa.z() < pb.z();
    return a < b;
  });
  return order;
}

std::vector<Block> partition_blocks(const RoomCloud& room,
                                    const PartitionOptions& options) {
  if (!(options.block_size > 0.0) || !std::isfinite(options.block_size)) {
    throw InvalidArgumentError("partition_blocks: block_size must be positive");
  }
  if (options.points_per_block < 1) {
    throw InvalidArgumentError(
        "partition_blocks: points_per_block must be >= 1");
  }
  if (options.min_points < 1) {
    throw InvalidArgumentError("partition_blocks: min_points must be >= 1");
  }
  if (room.size() == 0) {
    throw InvalidInputError("partition_blocks: empty room");
  }

  Vec3 room_min = room.positions[0];
  Vec3 room_max = room.positions[0];
  for (const Vec3& p : room.positions) {
    if (!p.allFinite()) {
      throw InvalidInputError("partition_blocks: non-finite coordinate");
    }
    room_min = room_min.cwiseMin(p);
    room_max = room_max.cwiseMax(p);
  }
  const Vec3 extent = room_max - room_min;

  // xy tiles anchored at the room minimum, visited in ascending order.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> tiles;
  for (int i = 0; i < room.size(); ++i) {
    const Vec3& p = room.positions[i];
    const auto tx = static_cast<std::int64_t>(
        std::floor((p.x() - room_min.x()) / options.block_size));
    const auto ty = static_cast<std::int64_t>(
        std::floor((p.y() - room_min.y()) / options.block_size));
    tiles[{tx, ty}].push_back(i);
  }

  Rng rng(options.seed);
  const int target = options.points_per_block;

  std::vector<Block> blocks;
  for (auto& [tile, members] : tiles) {
    const int m = static_cast<int>(members.size());
    if (m < options.min_points) continue;

    std::vector<int> chosen;
    chosen.reserve(target);
    if (m > target) {
      // Without replacement: partial Fisher-Yates, then room order.
      std::vector<int> pool = members;
      for (int i = 0; i < target; ++i) {
        const int j = i + rng.below_int(m - i);
        std::swap(pool[i], pool[j]);
      }
      chosen.assign(pool.begin(), pool.begin() + target);
      std::sort(chosen.begin(), chosen.end());
    } else {
      chosen = members;  // keep all originals
      for (int i = m; i < target; ++i) {
        chosen.push_back(members[rng.below_int(m)]);
      }
    }

    Vec3 block_min = room.positions[chosen[0]];
    for (int idx : chosen) block_min = block_min.cwiseMin(room.positions[idx]);

    Block block;
    const int n = static_cast<int>(chosen.size());
    block.cloud.positions.resize(n);
    block.cloud.features = Tensor2D(n, 9);
    block.cloud.labels.resize(n);
    block.source_indices = chosen;
    for (int i = 0; i < n; ++i) {
      const int idx = chosen[i];
      const Vec3& p = room.positions[idx];
      const Vec3 rel = p - block_min;
      block.cloud.positions[i] = rel;
      double* f = block.cloud.features.row(i);
      f[0] = rel.x();
      f[1] = rel.y();
      f[2] = rel.z();
      f[3] = room.colors[idx][0] / 255.0;
      f[4] = room.colors[idx][1] / 255.0;
      f[5] = room.colors[idx][2] / 255.0;
      for (int a = 0; a < 3; ++a) {
        f[6 + a] = extent[a] > 0.0 ? (p[a] - room_min[a]) / extent[a] : 0.0;
      }
      block.cloud.labels[i] = room.labels[idx];
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

int attach_normals(std::vector<Block>& blocks, const RoomCloud& room, int k,
                   const Vec3& viewpoint) {
  int fallback_count = 0;
  std::vector<Vec3> normals;
  if (room.has_normals()) {
    if (room.normals.size() != room.positions.size()) {
      throw InvalidInputError("attach_normals: normal count != point count");
    }
    normals = room.normals;
  } else {
    NormalEstimate estimate = estimate_normals(room.positions, k, viewpoint);
    normals = std::move(estimate.normals);
    fallback_count = estimate.degenerate_count;
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Block& block = blocks[b];
    if (block.cloud.channels() != 9) {
      throw InvalidInputError("attach_normals: block " + std::to_string(b) +
                              " has " + std::to_string(block.cloud.channels()) +
                              " channels, expected 9");
    }
    const int n = block.cloud.size();
    Tensor2D widened(n, 12);
    for (int i = 0; i < n; ++i) {
      const int src = block.source_indices[i];
      if (src < 0 || src >= room.size()) {
        throw InvalidInputError("attach_normals: block " + std::to_string(b) +
                                " point " + std::to_string(i) +
                                " has source index outside the room");
      }
      const double* old = block.cloud.features.row(i);
      double* f = widened.row(i);
      std::copy(old, old + 9, f);
      f[9] = normals[src].x();
      f[10] = normals[src].y();
      f[11] = normals[src].z();
    }
    block.cloud.features = std::move(widened);
  }
  return fallback_count;
}

Block canonical_sort(Block block, double cell_size) {
  const std::vector<int> order = canonical_order(block.cloud.positions, cell_size);
  const int n = block.cloud.size();

  Block sorted;
  sorted.cloud.positions.resize(n);
  sorted.cloud.features = Tensor2D(n, block.cloud.channels());
  sorted.cloud.labels.resize(n);
  sorted.source_indices.resize(n);
  for (int s = 0; s < n; ++s) {
    const int i = order[s];
    sorted.cloud.positions[s] = block.cloud.positions[i];
    const double* src = block.cloud.features.row(i);
    std::copy(src, src + block.cloud.channels(), sorted.cloud.features.row(s));
    sorted.cloud.labels[s] = block.cloud.labels.empty() ? -1 : block.cloud.labels[i];
    sorted.source_indices[s] =
        block.source_indices.empty() ? i : block.source_indices[i];
  }
  if (block.cloud.labels.empty()) sorted.cloud.labels.clear();
  if (block.source_indices.empty()) sorted.source_indices.clear();
  return sorted;
}

}  // namespace paaconv
