#include "paaconv/point_cloud.hpp"

#include <string>

#include "paaconv/errors.hpp"

namespace paaconv {

PointCloud PointCloud::from_points(const std::vector<Point>& points) {
  PointCloud cloud;
  const int n = static_cast<int>(points.size());
  const int c = n > 0 ? static_cast<int>(points[0].features.size()) : 0;
  cloud.positions.reserve(points.size());
  cloud.features = Tensor2D(n, c);
  cloud.labels.reserve(points.size());
  for (int i = 0; i < n; ++i) {
    const Point& p = points[i];
    if (static_cast<int>(p.features.size()) != c) {
      throw InvalidInputError("PointCloud: point " + std::to_string(i) +
                              " has " + std::to_string(p.features.size()) +
                              " features, expected " + std::to_string(c));
    }
    cloud.positions.push_back(p.position);
    for (int j = 0; j < c; ++j) cloud.features(i, j) = p.features[j];
    cloud.labels.push_back(p.label);
  }
  return cloud;
}

Point PointCloud::point(int i) const {
  Point p;
  p.position = positions[i];
  p.features.assign(features.row(i), features.row(i) + features.cols());
  p.label = labels.empty() ? -1 : labels[i];
  return p;
}

}  // namespace paaconv
