#pragma once

#include <Eigen/Core>
#include <vector>

#include "paaconv/tensor.hpp"

namespace paaconv {

using Vec3 = Eigen::Vector3d;

// One point with its per-channel features. Used at API boundaries; the
// hot paths work on the columnar PointCloud below.
struct Point {
  Vec3 position = Vec3::Zero();
  std::vector<double> features;
  int label = -1;  // -1 = unlabeled
};

// Columnar point set: positions in meters, features as an n x c matrix,
// optional labels (-1 where absent).
struct PointCloud {
  std::vector<Vec3> positions;
  Tensor2D features;  // size() x channels()
  std::vector<int> labels;

  int size() const { return static_cast<int>(positions.size()); }
  int channels() const { return features.cols(); }

  // Validates that every point carries the same feature arity.
  static PointCloud from_points(const std::vector<Point>& points);
  Point point(int i) const;
};

}  // namespace paaconv
