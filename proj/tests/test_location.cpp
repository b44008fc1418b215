// Spatial median (Weiszfeld with anchor handling, with and without the
// Newton acceleration) and the k-step LTS location.

#include <catch_amalgamated.hpp>

#include <random>
#include <stdexcept>

#include "gspca/location.hpp"

using Catch::Approx;

namespace {

Eigen::MatrixXd random_cloud(int n, int p, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = nd(eng);
  return X;
}

}  // namespace

TEST_CASE("spatial median of a majority-coincident sample is that point") {
  // 5 of 8 points at (1, 2): the subgradient condition holds there.
  Eigen::MatrixXd X(8, 2);
  X << 1, 2, 1, 2, 1, 2, 1, 2, 1, 2,
      10, 0, -4, 7, 3, -9;
  const gspca::LocationEstimate est = gspca::spatial_median(X);
  REQUIRE(est.center(0) == Approx(1.0).margin(1e-9));
  REQUIRE(est.center(1) == Approx(2.0).margin(1e-9));
}

TEST_CASE("spatial median: 1-D case equals the univariate median") {
  Eigen::MatrixXd X(5, 1);
  X << 1, 2, 3, 4, 100;
  REQUIRE(gspca::spatial_median(X).center(0) == Approx(3.0).margin(1e-8));
}

TEST_CASE("accelerated and plain iterations agree") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd X = random_cloud(60, 4, seed);
    const Eigen::VectorXd a = gspca::spatial_median(X, 1e-12, 2000, true).center;
    const Eigen::VectorXd b = gspca::spatial_median(X, 1e-12, 2000, false).center;
    REQUIRE((a - b).norm() < 1e-9);
  }
}

TEST_CASE("spatial median is orthogonally and translation equivariant") {
  const Eigen::MatrixXd X = random_cloud(40, 3, 7);
  // Householder reflection as an exactly orthogonal matrix.
  Eigen::Vector3d u(1.0, -2.0, 0.5);
  u.normalize();
  const Eigen::Matrix3d R = Eigen::Matrix3d::Identity() - 2.0 * u * u.transpose();
  const Eigen::Vector3d shift(3.0, -1.0, 2.0);

  const Eigen::VectorXd m = gspca::spatial_median(X).center;
  const Eigen::MatrixXd Xt =
      (X * R.transpose()).rowwise() + shift.transpose();
  const Eigen::VectorXd mt = gspca::spatial_median(Xt).center;
  REQUIRE((mt - (R * m + shift)).norm() < 1e-7);
}

TEST_CASE("spatial median resists a cluster of far outliers") {
  Eigen::MatrixXd X = random_cloud(50, 2, 11);
  for (int i = 0; i < 20; ++i) X.row(i) = Eigen::RowVector2d(1e4, 1e4);
  const Eigen::VectorXd m = gspca::spatial_median(X).center;
  REQUIRE(m.norm() < 5.0);
}

TEST_CASE("kstep_lts with k=0 is the spatial median") {
  const Eigen::MatrixXd X = random_cloud(30, 3, 5);
  const Eigen::VectorXd a = gspca::kstep_lts(X, 0).center;
  const Eigen::VectorXd b = gspca::spatial_median(X).center;
  REQUIRE((a - b).norm() == 0.0);
}

TEST_CASE("kstep_lts averages the h closest points") {
  // Data designed so the spatial median sits near the origin and the h = 3
  // closest of n = 5 points are rows 0..2.
  Eigen::MatrixXd X(5, 2);
  X << 0.1, 0.0,
      -0.1, 0.1,
      0.0, -0.1,
      5.0, 5.0,
      -6.0, 4.0;
  const gspca::LocationEstimate est = gspca::kstep_lts(X, 1);
  const Eigen::Vector2d expected = (X.row(0) + X.row(1) + X.row(2)) / 3.0;
  REQUIRE((est.center - expected).norm() < 1e-12);
  // A second step keeps the same half-sample here.
  const gspca::LocationEstimate est2 = gspca::kstep_lts(X, 2);
  REQUIRE((est2.center - expected).norm() < 1e-12);
}

TEST_CASE("kstep_lts ignores a minority of gross outliers") {
  Eigen::MatrixXd X = random_cloud(101, 3, 13);
  for (int i = 0; i < 45; ++i) X.row(i).setConstant(1e6);
  const Eigen::VectorXd c = gspca::kstep_lts(X, 2).center;
  REQUIRE(c.norm() < 2.0);
}

TEST_CASE("location estimators validate their inputs") {
  Eigen::MatrixXd empty(0, 2), one(1, 2);
  one << 3.0, 4.0;
  REQUIRE_THROWS_AS(gspca::spatial_median(empty), std::invalid_argument);
  REQUIRE(gspca::spatial_median(one).center(1) == 4.0);
  REQUIRE_THROWS_AS(gspca::kstep_lts(one, 2), std::invalid_argument);
  Eigen::MatrixXd two(2, 1);
  two << 0.0, 1.0;
  REQUIRE_THROWS_AS(gspca::kstep_lts(two, -1), std::invalid_argument);
}
