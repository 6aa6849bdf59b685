#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "paaconv/errors.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/voxel_grid.hpp"
#include "test_util.hpp"

using namespace paaconv;

TEST_CASE("cells partition points as floor((p - min) / h)") {
  PointCloud cloud;
  cloud.positions = {{0.0, 0.0, 0.0}, {0.09, 0.0, 0.0}, {0.1, 0.0, 0.0},
                     {0.0, 0.35, 0.0}};
  cloud.features = Tensor2D(4, 1);
  const VoxelGrid grid = build_grid(cloud, 0.1);

  CHECK(grid.cell_of(cloud.positions[0]) == CellCoord{0, 0, 0});
  CHECK(grid.cell_of(cloud.positions[1]) == CellCoord{0, 0, 0});
  // 0.1 / 0.1 lands exactly on the next cell boundary
  CHECK(grid.cell_of(cloud.positions[2]) == CellCoord{1, 0, 0});
  CHECK(grid.cell_of(cloud.positions[3]) == CellCoord{0, 3, 0});
  CHECK(grid.cells().size() == 3);
}

TEST_CASE("grid origin is the componentwise minimum") {
  Rng rng(22);
  PointCloud cloud = testutil::random_cloud(rng, 40, 1, 2.0);
  const VoxelGrid grid = build_grid(cloud, 0.25);
  Vec3 expected = cloud.positions[0];
  for (const auto& p : cloud.positions) expected = expected.cwiseMin(p);
  CHECK((grid.origin() - expected).cwiseAbs().maxCoeff() == 0.0);

  // with that origin every cell coordinate is non-negative
  for (const auto& [coord, members] : grid.cells()) {
    CHECK(coord.x >= 0);
    CHECK(coord.y >= 0);
    CHECK(coord.z >= 0);
    CHECK(!members.empty());
  }
}

TEST_CASE("cell membership is invariant under rigid translation") {
  Rng rng(23);
  PointCloud cloud = testutil::random_cloud(rng, 60, 1, 3.0);
  const VoxelGrid base = build_grid(cloud, 0.2);

  PointCloud moved = cloud;
  const Vec3 shift{17.2, -4.5, 100.25};
  for (auto& p : moved.positions) p += shift;
  const VoxelGrid shifted = build_grid(moved, 0.2);

  // the sets of member lists agree cell for cell; coordinates may differ
  // only through floating point interaction of the shifted origin
  REQUIRE(base.cells().size() == shifted.cells().size());
  auto a = base.cells().begin();
  auto b = shifted.cells().begin();
  int agreeing = 0;
  for (; a != base.cells().end(); ++a, ++b) {
    if (a->second == b->second) ++agreeing;
  }
  // allow a tiny number of boundary flips from the translated arithmetic
  CHECK(agreeing >= static_cast<int>(base.cells().size()) - 2);
}

TEST_CASE("every point lands in exactly one cell") {
  Rng rng(24);
  PointCloud cloud = testutil::random_cloud(rng, 100, 2);
  const VoxelGrid grid = build_grid(cloud, 0.15);
  std::vector<int> seen(100, 0);
  for (const auto& [coord, members] : grid.cells()) {
    for (int idx : members) ++seen[idx];
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == 100);
  CHECK(grid.point_count() == 100);
}

TEST_CASE("cell means average the member features") {
  PointCloud cloud;
  cloud.positions = {{0.0, 0.0, 0.0}, {0.01, 0.0, 0.0}, {5.0, 0.0, 0.0}};
  cloud.features = Tensor2D(3, 2);
  cloud.features(0, 0) = 1.0;
  cloud.features(0, 1) = 2.0;
  cloud.features(1, 0) = 3.0;
  cloud.features(1, 1) = 6.0;
  cloud.features(2, 0) = 10.0;
  const VoxelGrid grid = build_grid(cloud, 0.5);

  const auto mean = grid.cell_mean(grid.cell_of(cloud.positions[0]));
  REQUIRE(mean.size() == 2);
  CHECK(mean[0] == 2.0);
  CHECK(mean[1] == 4.0);

  // empty cell: zero vector of the right arity
  const auto empty = grid.cell_mean({100, 100, 100});
  REQUIRE(empty.size() == 2);
  CHECK(empty[0] == 0.0);
  CHECK(empty[1] == 0.0);
}

TEST_CASE("grid rejects bad cell sizes and non-finite points") {
  Rng rng(25);
  PointCloud cloud = testutil::random_cloud(rng, 3, 1);
  CHECK_THROWS_AS(build_grid(cloud, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(build_grid(cloud, -1.0), InvalidArgumentError);

  cloud.positions[1].y() = std::nan("");
  try {
    build_grid(cloud, 0.5);
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("atrous offsets enumerate 27 scaled neighbors with the center at 13") {
  const auto offsets = atrous_offsets(3);
  REQUIRE(offsets.size() == 27);
  CHECK(offsets[0] == CellCoord{-3, -3, -3});
  CHECK(offsets[13] == CellCoord{0, 0, 0});
  CHECK(offsets[26] == CellCoord{3, 3, 3});

  // lexicographic order and stride scaling
  int t = 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -1; k <= 1; ++k) {
        CHECK(offsets[t] == CellCoord{3 * i, 3 * j, 3 * k});
        ++t;
      }
    }
  }
  CHECK_THROWS_AS(atrous_offsets(0), InvalidArgumentError);
}

TEST_CASE("negative coordinates floor toward minus infinity") {
  PointCloud cloud;
  cloud.positions = {{-0.05, 0.0, 0.0}, {0.05, 0.0, 0.0}};
  cloud.features = Tensor2D(2, 1);
  const VoxelGrid grid = build_grid(cloud, 0.1);
  // origin is (-0.05, 0, 0); both land in non-negative cells
  CHECK(grid.cell_of(cloud.positions[0]) == CellCoord{0, 0, 0});
  CHECK(grid.cell_of(cloud.positions[1]) == CellCoord{1, 0, 0});
}
