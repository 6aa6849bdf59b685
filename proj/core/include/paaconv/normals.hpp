#pragma once

#include <vector>

#include "paaconv/point_cloud.hpp"

namespace paaconv {

// Unit normal of the total-least-squares plane through the given points:
// the eigenvector of the smallest eigenvalue of the neighborhood
// covariance. The sign is canonicalized (largest-magnitude component made
// positive) so the result is deterministic; orientation against a
// viewpoint is a separate step. Throws DegenerateNeighborhoodError when
// fewer than 3 points are given or when the two smallest eigenvalues
// vanish relative to the largest (rank < 2, no unique plane).
Vec3 fit_plane_normal(const std::vector<Vec3>& neighborhood);

// Flips the normal so it points from the point toward the viewpoint
// (dot(normal, viewpoint - point) >= 0). An exact zero dot keeps the
// canonical sign from fit_plane_normal.
Vec3 orient_normal(const Vec3& normal, const Vec3& point, const Vec3& viewpoint);

struct NormalEstimate {
  std::vector<Vec3> normals;  // one unit vector per point
  int degenerate_count = 0;   // points that fell back to +z
};

// Per-point normals from the k-nearest neighborhood (the point itself
// included), oriented toward the viewpoint. Degenerate neighborhoods fall
// back to +z (then oriented) and are counted instead of failing the whole
// cloud. Throws InvalidArgumentError for k < 3 and InvalidInputError for
// clouds smaller than 3 points.
NormalEstimate estimate_normals(const std::vector<Vec3>& positions, int k,
                                const Vec3& viewpoint = Vec3::Zero());
NormalEstimate estimate_normals(const PointCloud& cloud, int k,
                                const Vec3& viewpoint = Vec3::Zero());

}  // namespace paaconv
