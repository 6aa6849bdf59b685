#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>

#include "doctest.h"
#include "oracles.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/kdtree.hpp"
#include "paaconv/normals.hpp"
#include "paaconv/rng.hpp"
#include "test_util.hpp"

using namespace paaconv;

TEST_CASE("knn matches brute force on random clouds") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 50 + rng.below_int(451);  // up to 500
    auto points = testutil::random_positions(rng, n, 2.0);
    const KdTree tree(points);
    for (int k : {1, 4, 16}) {
      for (int q = 0; q < 10; ++q) {
        const Vec3 query{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0),
                         rng.uniform(0.0, 2.0)};
        CHECK(tree.knn(query, k) == oracle::knn_reference(points, query, k));
      }
    }
  }
}

TEST_CASE("knn breaks distance ties by index") {
  // eight corners of a cube, query at the center: all equidistant
  std::vector<Vec3> corners;
  for (int x = 0; x <= 1; ++x) {
    for (int y = 0; y <= 1; ++y) {
      for (int z = 0; z <= 1; ++z) corners.push_back({double(x), double(y), double(z)});
    }
  }
  const KdTree tree(corners);
  const Vec3 center{0.5, 0.5, 0.5};
  const auto got = tree.knn(center, 5);
  CHECK(got == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(got == oracle::knn_reference(corners, center, 5));
}

TEST_CASE("knn handles duplicates, small k, and oversized k") {
  std::vector<Vec3> points = {{0, 0, 0}, {0, 0, 0}, {1, 1, 1}};
  const KdTree tree(points);
  CHECK(tree.knn({0, 0, 0}, 2) == std::vector<int>{0, 1});
  CHECK(tree.knn({0, 0, 0}, 10) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(tree.knn({0, 0, 0}, 0), InvalidArgumentError);
  CHECK_THROWS_AS(tree.knn({std::nan(""), 0, 0}, 1), InvalidInputError);
}

TEST_CASE("knn agrees with brute force across leaf sizes") {
  Rng rng(32);
  auto points = testutil::random_positions(rng, 200, 1.0);
  for (int leaf : {1, 2, 8, 64, 512}) {
    const KdTree tree(points, leaf);
    const Vec3 query{0.5, 0.5, 0.5};
    CHECK(tree.knn(query, 7) == oracle::knn_reference(points, query, 7));
  }
}

TEST_CASE("plane fit recovers an exact plane and matches the closed-form solver") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    // random plane through a random anchor
    Vec3 normal{rng.normal(), rng.normal(), rng.normal()};
    normal.normalize();
    Vec3 u = normal.unitOrthogonal();
    Vec3 v = normal.cross(u);
    Vec3 anchor{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};

    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) {
      pts.push_back(anchor + u * rng.uniform(-1, 1) + v * rng.uniform(-1, 1));
    }
    const Vec3 fit = fit_plane_normal(pts);
    CHECK(std::abs(fit.norm() - 1.0) < 1e-9);
    CHECK(std::abs(std::abs(fit.dot(normal)) - 1.0) < 1e-9);

    // independent eigensolver on the same covariance agrees up to sign
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts) mean += p;
    mean /= double(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
      const Vec3 d = p - mean;
      cov += d * d.transpose();
    }
    cov /= double(pts.size());
    const Vec3 reference = oracle::smallest_eigenvector_reference(cov);
    CHECK(std::abs(std::abs(fit.dot(reference)) - 1.0) < 1e-6);
  }
}

TEST_CASE("noisy plane normals stay within five degrees") {
  Rng rng(34);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) {
    pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.normal(0.0, 1e-3)});
  }
  const auto est = estimate_normals(pts, 16, {0.5, 0.5, 10.0});
  REQUIRE(est.normals.size() == pts.size());
  double mean_angle = 0.0;
  for (const auto& n : est.normals) {
    CHECK(std::abs(n.norm() - 1.0) < 1e-9);
    const double cosine = std::clamp(std::abs(n.z()), 0.0, 1.0);
    mean_angle += std::acos(cosine);
  }
  mean_angle = mean_angle / double(pts.size()) * 180.0 / std::numbers::pi;
  CHECK(mean_angle < 5.0);
}

TEST_CASE("normals are oriented toward the viewpoint") {
  Rng rng(35);
  auto pts = testutil::random_positions(rng, 300, 1.0);
  const Vec3 viewpoint{0.5, 0.5, 5.0};
  const auto est = estimate_normals(pts, 12, viewpoint);
  int oriented = 0, perpendicular = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = est.normals[i].dot(viewpoint - pts[i]);
    if (d == 0.0) {
      ++perpendicular;
    } else if (d > 0.0) {
      ++oriented;
    }
  }
  CHECK(oriented + perpendicular == static_cast<int>(pts.size()));
}

TEST_CASE("plane fit is rotation equivariant") {
  Rng rng(36);
  std::vector<Vec3> pts;
  for (int i = 0; i < 40; ++i) {
    pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1),
                   0.3 * rng.uniform(-0.01, 0.01)});
  }
  const Vec3 base = fit_plane_normal(pts);

  const Eigen::AngleAxisd rot(0.83, Vec3{1.0, 2.0, -0.5}.normalized());
  std::vector<Vec3> rotated;
  for (const auto& p : pts) rotated.push_back(rot * p);
  const Vec3 turned = fit_plane_normal(rotated);

  const Vec3 expected = rot * base;
  const double agreement = std::abs(turned.dot(expected));
  CHECK(std::abs(agreement - 1.0) < 1e-6);
}

TEST_CASE("degenerate neighborhoods are refused or counted") {
  // collinear points have no unique plane
  std::vector<Vec3> line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  CHECK_THROWS_AS(fit_plane_normal(line), DegenerateNeighborhoodError);
  std::vector<Vec3> pair = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(fit_plane_normal(pair), DegenerateNeighborhoodError);

  // the batch API falls back to +z and counts instead of throwing
  const auto est = estimate_normals(line, 3, {0, 0, 5});
  CHECK(est.degenerate_count == 4);
  for (const auto& n : est.normals) {
    CHECK(n.z() == 1.0);
  }

  CHECK_THROWS_AS(estimate_normals(line, 2), InvalidArgumentError);
  std::vector<Vec3> tiny = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(estimate_normals(tiny, 3), InvalidInputError);
}

TEST_CASE("orientation flip respects an exact perpendicular") {
  const Vec3 n{0, 0, 1};
  CHECK(orient_normal(n, {0, 0, 0}, {0, 0, 5}).z() == 1.0);
  CHECK(orient_normal(n, {0, 0, 0}, {0, 0, -5}).z() == -1.0);
  // viewpoint in the plane of the normal: keep the canonical sign
  CHECK(orient_normal(n, {0, 0, 0}, {1, 0, 0}).z() == 1.0);
}

TEST_CASE("estimate_normals output lines up with a per-point manual fit") {
  Rng rng(37);
  auto pts = testutil::random_positions(rng, 80, 1.0);
  const Vec3 viewpoint{0.5, 0.5, 4.0};
  const auto est = estimate_normals(pts, 8, viewpoint);
  REQUIRE(est.normals.size() == pts.size());

  for (int probe : {0, 17, 42, 79}) {
    const auto idx = oracle::knn_reference(pts, pts[probe], 8);
    std::vector<Vec3> neighborhood;
    for (int i : idx) neighborhood.push_back(pts[i]);
    Vec3 manual;
    try {
      manual = fit_plane_normal(neighborhood);
    } catch (const DegenerateNeighborhoodError&) {
      manual = {0.0, 0.0, 1.0};
    }
    manual = orient_normal(manual, pts[probe], viewpoint);
    CHECK((est.normals[probe] - manual).cwiseAbs().maxCoeff() < 1e-12);
  }

  // a second run is bitwise identical regardless of worker scheduling
  const auto again = estimate_normals(pts, 8, viewpoint);
  for (std::size_t i = 0; i < est.normals.size(); ++i) {
    CHECK((est.normals[i] - again.normals[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}
