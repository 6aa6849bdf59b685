#pragma once

#include <vector>

#include "paaconv/point_cloud.hpp"

namespace paaconv {

// Static 3-d k-d tree with axis-aligned median splits (axis cycles with
// depth, median ties broken by point index so the tree is deterministic).
class KdTree {
 public:
  explicit KdTree(std::vector<Vec3> points, int leaf_size = 16);

  int size() const { return static_cast<int>(points_.size()); }

  // Indices of the k nearest neighbors of query, sorted by squared
  // distance with index as tie-break. Returns min(k, size()) indices.
  // Throws InvalidArgumentError for k < 1 and InvalidInputError for a
  // non-finite query.
  std::vector<int> knn(const Vec3& query, int k) const;

  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    int begin = 0;        // leaf range into order_
    int end = 0;
  };

  int build(int begin, int end, int depth);
  void search(int node, const Vec3& query, int k,
              std::vector<std::pair<double, int>>& heap) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int leaf_size_;
};

}  // namespace paaconv
