#include "paaconv/normals.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "paaconv/errors.hpp"
#include "paaconv/kdtree.hpp"
#include "paaconv/parallel.hpp"

namespace paaconv {

namespace {

Vec3 canonical_sign(Vec3 n) {
  int pivot = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n[i]) > std::abs(n[pivot])) pivot = i;
  }
  if (n[pivot] < 0.0) n = -n;
  return n;
}

}  // namespace

Vec3 fit_plane_normal(const std::vector<Vec3>& neighborhood) {
  if (neighborhood.size() < 3) {
    throw DegenerateNeighborhoodError(
        "fit_plane_normal: need at least 3 points, got " +
        std::to_string(neighborhood.size()));
  }

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : neighborhood) mean += p;
  mean /= static_cast<double>(neighborhood.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : neighborhood) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(neighborhood.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Vec3 evals = solver.eigenvalues();  // ascending
  const double largest = evals[2];
  if (!(largest > 0.0) ||
      (evals[0] <= 1e-12 * largest && evals[1] <= 1e-12 * largest)) {
    throw DegenerateNeighborhoodError(
        "fit_plane_normal: neighborhood is rank-deficient");
  }

  Vec3 normal = solver.eigenvectors().col(0);
  normal.normalize();
  return canonical_sign(normal);
}

Vec3 orient_normal(const Vec3& normal, const Vec3& point, const Vec3& viewpoint) {
  const double toward = normal.dot(viewpoint - point);
  return toward < 0.0 ? Vec3(-normal) : normal;
}

NormalEstimate estimate_normals(const std::vector<Vec3>& positions, int k,
                                const Vec3& viewpoint) {
  if (k < 3) {
    throw InvalidArgumentError("estimate_normals: k must be >= 3");
  }
  if (positions.size() < 3) {
    throw InvalidInputError("estimate_normals: need at least 3 points, got " +
                            std::to_string(positions.size()));
  }

  const KdTree tree(positions);
  const int n = static_cast<int>(positions.size());

  NormalEstimate out;
  out.normals.assign(positions.size(), Vec3::Zero());
  std::vector<char> degenerate(positions.size(), 0);

  parallel_for(n, [&](int i) {
    const auto idx = tree.knn(positions[i], k);
    std::vector<Vec3> nb;
    nb.reserve(idx.size());
    for (int j : idx) nb.push_back(positions[j]);
    Vec3 normal;
    try {
      normal = fit_plane_normal(nb);
    } catch (const DegenerateNeighborhoodError&) {
      normal = Vec3::UnitZ();
      degenerate[i] = 1;
    }
    out.normals[i] = orient_normal(normal, positions[i], viewpoint);
  });

  for (char d : degenerate) out.degenerate_count += d;
  return out;
}

NormalEstimate estimate_normals(const PointCloud& cloud, int k,
                                const Vec3& viewpoint) {
  return estimate_normals(cloud.positions, k, viewpoint);
}

}  // namespace paaconv
