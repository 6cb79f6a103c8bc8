#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "alarmgraph/pca.hpp"
#include "alarmgraph/rng.hpp"
#include "support.hpp"

using namespace alarmgraph;

namespace {

Eigen::MatrixXd gaussian_matrix(rng& r, int m, int d, double scale = 1.0) {
  Eigen::MatrixXd x(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = scale * r.gaussian();
  return x;
}

/// Covariance with 1/m normalization computed directly from centered data.
Eigen::MatrixXd direct_covariance(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("a line embedded in 3-D has one nonzero eigenvalue") {
  rng r(61);
  const int m = 40;
  Eigen::Vector3d direction(1.0, -2.0, 0.5);
  direction.normalize();
  Eigen::MatrixXd x(m, 3);
  std::vector<double> ts;
  for (int i = 0; i < m; ++i) {
    double t = r.uniform(-3, 3);
    ts.push_back(t);
    x.row(i) = (t * direction).transpose();
  }
  auto model = pca_fit(x, 3);

  // Oracle: the 1/m variance of the points along the line.
  double mean_t = 0;
  for (double t : ts) mean_t += t;
  mean_t /= m;
  double var = 0;
  for (double t : ts) var += (t - mean_t) * (t - mean_t);
  var /= m;

  CHECK_THAT(model.eigenvalues(0), Catch::Matchers::WithinAbs(var, 1e-10));
  CHECK(std::abs(model.eigenvalues(1)) <= 1e-10);
  CHECK(std::abs(model.eigenvalues(2)) <= 1e-10);
  CHECK_THAT(std::abs(model.components.col(0).dot(direction)),
             Catch::Matchers::WithinAbs(1.0, 1e-8));
}

TEST_CASE("whitened data has near-equal eigenvalues") {
  // Exactly isotropic 2-D data by construction: the four unit points.
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  auto model = pca_fit(x, 2);
  CHECK_THAT(model.eigenvalues(0), Catch::Matchers::WithinAbs(model.eigenvalues(1), 1e-12));
  // Any orthonormal basis is acceptable.
  Eigen::MatrixXd gram = model.components.transpose() * model.components;
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("full-rank eigendecomposition reconstructs the covariance") {
  rng r(67);
  auto x = gaussian_matrix(r, 25, 5);
  auto model = pca_fit(x, 5);
  Eigen::MatrixXd rebuilt =
      model.components * model.eigenvalues.asDiagonal() * model.components.transpose();
  CHECK((rebuilt - direct_covariance(x)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("components are orthonormal and eigenpairs have small residuals") {
  rng r(71);
  auto x = gaussian_matrix(r, 30, 6, 2.0);
  auto model = pca_fit(x, 4);
  Eigen::MatrixXd gram = model.components.transpose() * model.components;
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);

  auto cov = direct_covariance(x);
  for (int i = 0; i < 4; ++i) {
    double residual =
        (cov * model.components.col(i) - model.eigenvalues(i) * model.components.col(i)).norm();
    CHECK(residual <= 1e-8 * std::max(1.0, model.eigenvalues(0)));
  }
  for (int i = 1; i < 4; ++i) CHECK(model.eigenvalues(i) <= model.eigenvalues(i - 1) + 1e-12);
  for (int i = 0; i < 4; ++i) CHECK(model.eigenvalues(i) >= -1e-10);
}

TEST_CASE("sign convention: the largest-magnitude entry is positive") {
  rng r(73);
  auto x = gaussian_matrix(r, 20, 4);
  auto model = pca_fit(x, 4);
  for (int i = 0; i < 4; ++i) {
    Eigen::Index loc = 0;
    model.components.col(i).cwiseAbs().maxCoeff(&loc);
    CHECK(model.components(loc, i) > 0);
  }
}

TEST_CASE("projected training columns have variances equal to the eigenvalues") {
  rng r(79);
  auto x = gaussian_matrix(r, 50, 6, 1.5);
  auto model = pca_fit(x, 3);
  auto projected = pca_transform(model, x);

  for (int j = 0; j < 3; ++j) {
    double mean = projected.col(j).mean();
    CHECK(std::abs(mean) <= 1e-10);
    double var = (projected.col(j).array() - mean).square().sum() /
                 static_cast<double>(projected.rows());
    CHECK_THAT(var, Catch::Matchers::WithinAbs(model.eigenvalues(j), 1e-8));
  }

  // Variance ordering follows the eigenvalue ordering.
  for (int j = 1; j < 3; ++j) CHECK(model.eigenvalues(j) <= model.eigenvalues(j - 1) + 1e-12);
}

TEST_CASE("transforming the mean gives the zero vector") {
  rng r(83);
  auto x = gaussian_matrix(r, 15, 4);
  auto model = pca_fit(x, 2);
  Eigen::MatrixXd at_mean = pca_transform(model, model.mean.transpose());
  CHECK(at_mean.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("k = d projection preserves pairwise distances") {
  rng r(89);
  auto x = gaussian_matrix(r, 20, 5);
  auto model = pca_fit(x, 5);
  auto projected = pca_transform(model, x);
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j) {
      double before = (x.row(i) - x.row(j)).norm();
      double after = (projected.row(i) - projected.row(j)).norm();
      CHECK_THAT(after, Catch::Matchers::WithinAbs(before, 1e-8));
    }
}

TEST_CASE("pca_fit validates its inputs") {
  Eigen::MatrixXd one_row(1, 3);
  one_row.setZero();
  CHECK_THROWS_AS(pca_fit(one_row, 1), error);

  Eigen::MatrixXd x(5, 3);
  x.setRandom();
  CHECK_THROWS_AS(pca_fit(x, 0), error);
  CHECK_THROWS_AS(pca_fit(x, 4), error);
}

TEST_CASE("pca_transform rejects mismatched widths") {
  rng r(97);
  auto x = gaussian_matrix(r, 10, 3);
  auto model = pca_fit(x, 2);
  Eigen::MatrixXd wrong(4, 5);
  wrong.setZero();
  CHECK_THROWS_AS(pca_transform(model, wrong), error);
}

TEST_CASE("rank deficiency is not an error") {
  // 10 points in a 2-D subspace of 4-D.
  rng r(101);
  Eigen::MatrixXd basis = gaussian_matrix(r, 2, 4);
  Eigen::MatrixXd coeffs = gaussian_matrix(r, 10, 2);
  Eigen::MatrixXd x = coeffs * basis;
  auto model = pca_fit(x, 4);
  CHECK(std::abs(model.eigenvalues(2)) <= 1e-8);
  CHECK(std::abs(model.eigenvalues(3)) <= 1e-8);
}
