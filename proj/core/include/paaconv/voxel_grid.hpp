#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "paaconv/point_cloud.hpp"

namespace paaconv {

// Integer cell coordinate (also reused for cell offsets).
struct CellCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;

  CellCoord offset_by(const CellCoord& d) const {
    return {x + d.x, y + d.y, z + d.z};
  }
};

// Regular voxel partition of a cloud. The origin is the componentwise
// minimum of the positions, so the same set of points always lands in the
// same cells regardless of input order. Cells are kept in an ordered map,
// which makes every iteration over them canonical.
class VoxelGrid {
 public:
  double cell_size() const { return cell_size_; }
  const Vec3& origin() const { return origin_; }
  int channels() const { return channels_; }
  int point_count() const { return point_count_; }

  CellCoord cell_of(const Vec3& position) const;

  // Point indices per occupied cell, in input order.
  const std::map<CellCoord, std::vector<int>>& cells() const { return cells_; }

  // Mean feature vector of a cell; a zero vector of length channels() when
  // the cell is empty.
  std::vector<double> cell_mean(const CellCoord& cell) const;

  bool occupied(const CellCoord& cell) const {
    return cells_.find(cell) != cells_.end();
  }

  friend VoxelGrid build_grid(const PointCloud& cloud, double cell_size);

 private:
  double cell_size_ = 0.0;
  Vec3 origin_ = Vec3::Zero();
  int channels_ = 0;
  int point_count_ = 0;
  std::map<CellCoord, std::vector<int>> cells_;
  std::map<CellCoord, std::vector<double>> means_;
};

// Builds the grid over all points of the cloud. Throws
// InvalidArgumentError for a non-positive cell size and InvalidInputError
// (naming the point index) for non-finite coordinates.
VoxelGrid build_grid(const PointCloud& cloud, double cell_size);

// The 27 offsets (s*i, s*j, s*k), i,j,k in {-1,0,1}, in lexicographic
// order by (i, j, k); index 13 is the center. Throws InvalidArgumentError
// for stride < 1.
std::array<CellCoord, 27> atrous_offsets(int stride);

}  // namespace paaconv
