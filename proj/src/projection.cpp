#include "groove/projection.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "groove/error.hpp"

namespace groove {

PcaModel fit_pca(const Eigen::MatrixXd& X, std::size_t components, bool standardize) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto e = static_cast<std::size_t>(X.cols());
  if (n < 2) {
    throw InputError("PCA needs at least 2 rows");
  }
  if (components < 1 || components > std::min(n - 1, e)) {
    throw InputError("component count " + std::to_string(components) + " outside [1, " +
                     std::to_string(std::min(n - 1, e)) + "]");
  }
  if (!X.allFinite()) {
    throw InputError("PCA input contains non-finite values");
  }

  PcaModel model;
  model.mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - model.mean;
  model.scale = Eigen::RowVectorXd::Ones(X.cols());
  if (standardize) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n));
      if (sd > 0.0) model.scale(j) = sd;
    }
    centered = centered.array().rowwise() / model.scale.array();
  }
  if (!(centered.squaredNorm() > 0.0)) {
    throw NumericalError("PCA input has zero variance");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double total = sigma.squaredNorm();
  const auto c = static_cast<Eigen::Index>(components);

  model.components = svd.matrixV().leftCols(c).transpose();
  for (Eigen::Index i = 0; i < c; ++i) {
    Eigen::Index arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    if (model.components(i, arg) < 0.0) model.components.row(i) *= -1.0;
  }
  model.explained_variance_ratio = sigma.head(c).array().square() / total;
  return model;
}

Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.components.cols()) {
    throw InputError("projection input has " + std::to_string(X.cols()) + " columns, model expects " +
                     std::to_string(model.components.cols()));
  }
  const Eigen::MatrixXd scaled =
      (X.rowwise() - model.mean).array().rowwise() / model.scale.array();
  return scaled * model.components.transpose();
}

}  // namespace groove
