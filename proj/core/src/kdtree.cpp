#include "paaconv/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paaconv/errors.hpp"

namespace paaconv {

KdTree::KdTree(std::vector<Vec3> points, int leaf_size)
    : points_(std::move(points)), leaf_size_(std::max(1, leaf_size)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw InvalidInputError("KdTree: non-finite coordinate at point " +
                              std::to_string(i));
    }
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<int>(points_.size()), 0);
  }
}

int KdTree::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= leaf_size_) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double va = points_[a][axis];
                     const double vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[mid]][axis];

  // Children are built after the node is placed, so store results last;
  // the vector may reallocate during recursion.
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

namespace {

// Heap order: worst candidate (largest distance, then largest index) on top.
bool heap_less(const std::pair<double, int>& a, const std::pair<double, int>& b) {
  return a.first < b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

void KdTree::search(int node, const Vec3& query, int k,
                    std::vector<std::pair<double, int>>& heap) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const int idx = order_[i];
      const double d2 = (points_[idx] - query).squaredNorm();
      const std::pair<double, int> cand{d2, idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), heap_less);
      } else if (heap_less(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
    return;
  }

  const double delta = query[nd.axis] - nd.split;
  const int near = delta < 0.0 ? nd.left : nd.right;
  const int far = delta < 0.0 ? nd.right : nd.left;
  search(near, query, k, heap);
  // Equality is not prunable: an equally distant point with a smaller
  // index may still displace the current worst candidate.
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first) {
    search(far, query, k, heap);
  }
}

std::vector<int> KdTree::knn(const Vec3& query, int k) const {
  if (k < 1) throw InvalidArgumentError("KdTree::knn: k must be >= 1");
  if (!query.allFinite()) {
    throw InvalidInputError("KdTree::knn: non-finite query");
  }
  if (points_.empty()) return {};

  std::vector<std::pair<double, int>> heap;
  heap.reserve(static_cast<std::size_t>(std::min<std::size_t>(k, points_.size())));
  search(0, query, k, heap);
  std::sort(heap.begin(), heap.end(), heap_less);

  std::vector<int> result;
  result.reserve(heap.size());
  for (const auto& [d2, idx] : heap) result.push_back(idx);
  return result;
}

}  // namespace paaconv
