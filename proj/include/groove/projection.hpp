#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace groove {

struct PcaModel {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // c x e, orthonormal rows
  Eigen::VectorXd explained_variance_ratio;
  // Column scales applied before projection; all ones unless standardized.
  Eigen::RowVectorXd scale;
};

// Top-c principal directions from the SVD of the mean-centered data. Each
// component is signed so that its largest-magnitude loading is positive
// (first such index on ties). With `standardize`, columns are also divided by
// their population std (zero-spread columns are left unscaled).
PcaModel fit_pca(const Eigen::MatrixXd& X, std::size_t components, bool standardize = false);

// ((X - mean) / scale) * components^T
Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& X);

}  // namespace groove
