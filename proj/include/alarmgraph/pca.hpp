#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "alarmgraph/errors.hpp"

namespace alarmgraph {

/// Top-k eigenpairs of the (1/m-normalized) covariance of centered data.
/// Components are orthonormal columns, eigenvalues sorted descending, and each
/// component's largest-magnitude entry is made positive so outputs are stable.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // d x k
  Eigen::VectorXd eigenvalues; // k, descending
};

inline PcaModel pca_fit(const Eigen::MatrixXd& x, int k) {
  const Eigen::Index m = x.rows();
  const Eigen::Index d = x.cols();
  if (m < 2) throw error(errc::degenerate_input, "PCA needs at least 2 rows");
  if (k < 1 || k > d)
    throw error(errc::invalid_argument, "component count must be in [1, " +
                                            std::to_string(static_cast<long long>(d)) + "]");

  PcaModel model;
  model.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw error(errc::degenerate_input, "eigendecomposition failed");

  // Solver returns ascending eigenvalues; take the top k in descending order.
  model.components.resize(d, k);
  model.eigenvalues.resize(k);
  for (int i = 0; i < k; ++i) {
    Eigen::Index src = d - 1 - i;
    Eigen::VectorXd u = solver.eigenvectors().col(src);
    Eigen::Index maxloc = 0;
    u.cwiseAbs().maxCoeff(&maxloc);
    if (u(maxloc) < 0) u = -u;
    model.components.col(i) = u;
    model.eigenvalues(i) = solver.eigenvalues()(src);
  }
  return model;
}

/// Project rows of x onto the model components: row_i -> U^T (x_i - mean).
inline Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.mean.size())
    throw error(errc::shape_mismatch, "input has " +
                                          std::to_string(static_cast<long long>(x.cols())) +
                                          " columns, model expects " +
                                          std::to_string(static_cast<long long>(model.mean.size())));
  return (x.rowwise() - model.mean.transpose()) * model.components;
}

}  // namespace alarmgraph
