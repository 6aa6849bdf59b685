#include "paaconv/voxel_grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "paaconv/errors.hpp"

namespace paaconv {

namespace {

std::int64_t floor_index(double delta, double cell_size) {
  return static_cast<std::int64_t>(std::floor(delta / cell_size));
}

}  // namespace

CellCoord VoxelGrid::cell_of(const Vec3& position) const {
  return {floor_index(position.x() - origin_.x(), cell_size_),
          floor_index(position.y() - origin_.y(), cell_size_),
          floor_index(position.z() - origin_.z(), cell_size_)};
}

std::vector<double> VoxelGrid::cell_mean(const CellCoord& cell) const {
  auto it = means_.find(cell);
  if (it == means_.end()) return std::vector<double>(channels_, 0.0);
  return it->second;
}

VoxelGrid build_grid(const PointCloud& cloud, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidArgumentError("build_grid: cell_size must be positive");
  }

  VoxelGrid grid;
  grid.cell_size_ = cell_size;
  grid.channels_ = cloud.channels();
  grid.point_count_ = cloud.size();
  if (cloud.size() == 0) return grid;

  Vec3 origin = cloud.positions[0];
  for (int i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    if (!p.allFinite()) {
      throw InvalidInputError("build_grid: non-finite coordinate at point " +
                              std::to_string(i));
    }
    origin = origin.cwiseMin(p);
  }
  grid.origin_ = origin;

  for (int i = 0; i < cloud.size(); ++i) {
    grid.cells_[grid.cell_of(cloud.positions[i])].push_back(i);
  }

  const int c = cloud.channels();
  for (const auto& [coord, members] : grid.cells_) {
    std::vector<double> mean(c, 0.0);
    for (int idx : members) {
      const double* row = cloud.features.row(idx);
      for (int j = 0; j < c; ++j) mean[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (double& v : mean) v *= inv;
    grid.means_.emplace(coord, std::move(mean));
  }
  return grid;
}

std::array<CellCoord, 27> atrous_offsets(int stride) {
  if (stride < 1) {
    throw InvalidArgumentError("atrous_offsets: stride must be >= 1");
  }
  std::array<CellCoord, 27> offsets;
  int n = 0;
  const std::int64_t s = stride;
  for (std::int64_t i = -1; i <= 1; ++i) {
    for (std::int64_t j = -1; j <= 1; ++j) {
      for (std::int64_t k = -1; k <= 1; ++k) {
        offsets[n++] = {s * i, s * j, s * k};
      }
    }
  }
  return offsets;
}

}  // namespace paaconv
