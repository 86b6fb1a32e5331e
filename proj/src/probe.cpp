#include "groove/probe.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/Cholesky>

#include "groove/error.hpp"
#include "groove/parallel.hpp"
#include "groove/prng.hpp"

namespace groove {
namespace {

// Columns whose spread is below this fraction of their magnitude are treated
// as constant and excluded from the solve.
constexpr double kConstantColumnTolerance = 1e-12;
// Reciprocal condition estimate below which an unpenalized system is
// reported as singular.
constexpr double kSingularRcond = 1e-13;

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, double alpha) {
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || (alpha == 0.0 && llt.rcond() < kSingularRcond)) {
    throw NumericalError("ridge system is singular (alpha = " + std::to_string(alpha) + ")");
  }
  return llt.solve(rhs);
}

// Solves min ||A w - b||^2 + alpha ||w||^2 through whichever normal equations
// are smaller.
Eigen::VectorXd solve_penalized(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double alpha) {
  if (A.cols() == 0) return Eigen::VectorXd();
  if (alpha == 0.0 && A.cols() > A.rows()) {
    throw NumericalError("ridge system is singular (alpha = 0 with " + std::to_string(A.cols()) +
                         " columns and " + std::to_string(A.rows()) + " rows)");
  }
  if (A.cols() <= A.rows()) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(A.cols(), A.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += alpha;
    return cholesky_solve(gram, A.transpose() * b, alpha);
  }
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(A.rows(), A.rows());
  kernel.selfadjointView<Eigen::Lower>().rankUpdate(A);
  kernel = kernel.selfadjointView<Eigen::Lower>();
  kernel.diagonal().array() += alpha;
  return A.transpose() * cholesky_solve(kernel, b, alpha);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

void ProbeConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be a finite value >= 0");
  if (folds < 2) throw InputError("folds must be >= 2");
  if (seeds.empty()) throw InputError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InputError("seeds must be distinct");
  }
}

RidgeModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, bool standardize) {
  if (X.rows() < 1) throw InputError("ridge fit needs at least one row");
  if (X.rows() != y.size()) {
    throw InputError("ridge fit: X has " + std::to_string(X.rows()) + " rows, y has " + std::to_string(y.size()));
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be a finite value >= 0");
  if (!X.allFinite() || !y.allFinite()) throw NumericalError("ridge fit: non-finite input");

  const Eigen::Index e = X.cols();
  RidgeModel model;
  if (!standardize) {
    model.feature_means = Eigen::VectorXd::Zero(e);
    model.feature_stds = Eigen::VectorXd::Ones(e);
    model.target_mean = y.mean();
    model.intercept = 0.0;
    model.weights = solve_penalized(X, y, alpha);
    return model;
  }

  const double n = static_cast<double>(X.rows());
  model.feature_means = X.colwise().mean().transpose();
  model.feature_stds = Eigen::VectorXd::Ones(e);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < e; ++j) {
    const double sd = std::sqrt((X.col(j).array() - model.feature_means(j)).square().sum() / n);
    if (sd > kConstantColumnTolerance * std::max(1.0, std::abs(model.feature_means(j)))) {
      model.feature_stds(j) = sd;
      kept.push_back(j);
    }
  }
  Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Eigen::Index j = kept[k];
    Z.col(static_cast<Eigen::Index>(k)) = (X.col(j).array() - model.feature_means(j)) / model.feature_stds(j);
  }
  model.target_mean = y.mean();
  const Eigen::VectorXd centered = y.array() - model.target_mean;
  const Eigen::VectorXd w = solve_penalized(Z, centered, alpha);

  model.weights = Eigen::VectorXd::Zero(e);
  for (std::size_t k = 0; k < kept.size(); ++k) model.weights(kept[k]) = w(static_cast<Eigen::Index>(k));
  model.intercept = model.target_mean;
  return model;
}

Eigen::VectorXd predict(const RidgeModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.weights.size()) {
    throw InputError("predict: X has " + std::to_string(X.cols()) + " columns, model was trained on " +
                     std::to_string(model.weights.size()));
  }
  const Eigen::MatrixXd Z = (X.rowwise() - model.feature_means.transpose()).array().rowwise() /
                            model.feature_stds.transpose().array();
  return (Z * model.weights).array() + model.intercept;
}

double r2_score(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size()) throw InputError("r2_score: length mismatch");
  if (y_true.size() < 2) throw InputError("r2_score needs at least 2 values");
  const double mean = y_true.mean();
  const double total = (y_true.array() - mean).square().sum();
  if (!(total > 0.0)) throw NumericalError("r2_score: y_true is constant");
  const double residual = (y_pred - y_true).squaredNorm();
  return 1.0 - residual / total;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("k-fold split needs k >= 2");
  if (n < k) {
    throw InputError("cannot split " + std::to_string(n) + " items into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  shuffle(order, rng);

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

ProbeResult run_cv(const DesignMatrix& X, const Eigen::VectorXd& y, const ProbeConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(X.rows.rows());
  if (y.size() != X.rows.rows() || X.row_ids.size() != n) {
    throw InputError("design matrix and target vector are misaligned");
  }
  if (n < config.folds) {
    throw InputError(std::to_string(n) + " tracks cannot fill " + std::to_string(config.folds) + " folds");
  }
  const std::size_t runs = config.seeds.size();
  const std::size_t k = config.folds;

  std::vector<std::vector<std::vector<std::size_t>>> splits(runs);
  for (std::size_t s = 0; s < runs; ++s) splits[s] = kfold_split(n, k, config.seeds[s]);

  std::vector<double> fold_r2(runs * k, 0.0);
  std::vector<Eigen::VectorXd> run_predictions(runs, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  const std::size_t threads = config.threads ? config.threads : default_thread_count();

  parallel_for(runs * k, threads, [&](std::size_t task) {
    const std::size_t s = task / k;
    const std::size_t f = task % k;
    const auto& test = splits[s][f];
    std::vector<std::size_t> train;
    train.reserve(n - test.size());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), splits[s][g].begin(), splits[s][g].end());
    }
    const RidgeModel model = fit_ridge(take_rows(X.rows, train), take(y, train), config.alpha, config.standardize);
    const Eigen::VectorXd predicted = predict(model, take_rows(X.rows, test));
    const Eigen::VectorXd truth = take(y, test);
    if ((truth.array() == truth(0)).all()) {
      throw NumericalError(X.representation_name + ": seed " + std::to_string(config.seeds[s]) + " fold " +
                           std::to_string(f) + " has a constant test target; R^2 is undefined");
    }
    fold_r2[task] = r2_score(truth, predicted);
    // Each index appears in exactly one test fold per run, so tasks write
    // disjoint entries.
    for (std::size_t i = 0; i < test.size(); ++i) {
      run_predictions[s](static_cast<Eigen::Index>(test[i])) = predicted(static_cast<Eigen::Index>(i));
    }
  });

  ProbeResult result;
  result.representation_name = X.representation_name;
  result.target = config.target;
  result.alpha = config.alpha;
  result.folds = k;
  result.seeds = config.seeds;
  for (std::size_t s = 0; s < runs; ++s) {
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) sum += fold_r2[s * k + f];
    result.per_run_r2.push_back(sum / static_cast<double>(k));
  }
  result.mean_r2 = std::accumulate(result.per_run_r2.begin(), result.per_run_r2.end(), 0.0) / static_cast<double>(runs);
  double ss = 0.0;
  for (double r : result.per_run_r2) ss += (r - result.mean_r2) * (r - result.mean_r2);
  result.std_r2 = std::sqrt(ss / static_cast<double>(runs));

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < runs; ++s) sum += run_predictions[s](static_cast<Eigen::Index>(i));
    result.predictions[X.row_ids[i]] = sum / static_cast<double>(runs);
  }
  return result;
}

Eigen::VectorXd target_vector(const Corpus& corpus, const DesignMatrix& X, Target target) {
  const std::vector<double> values = corpus.target_values(target);
  Eigen::VectorXd y(static_cast<Eigen::Index>(X.row_ids.size()));
  for (std::size_t i = 0; i < X.row_ids.size(); ++i) {
    const auto index = corpus.index_of(X.row_ids[i]);
    if (!index) throw InputError("design matrix row '" + X.row_ids[i] + "' is not in the corpus");
    y(static_cast<Eigen::Index>(i)) = values[*index];
  }
  return y;
}

StemProbeOutcome probe_all_stems(const Corpus& corpus, const std::string& model_name,
                                 const std::filesystem::path& embedding_root, const ProbeConfig& config) {
  registry_entry(model_name);
  const Corpus rated = config.target == Target::kGroove ? derive_groove_rating(corpus) : corpus;
  StemProbeOutcome outcome;
  for (std::string_view stem : kStemTableOrder) {
    Representation rep{model_name, std::string(stem)};
    DesignMatrix X;
    try {
      X = assemble_design_matrix(rated, rep, {embedding_root, {}});
    } catch (const InputError& e) {
      outcome.warnings.push_back("skipping " + rep.name() + ": " + e.what());
      continue;
    }
    outcome.warnings.insert(outcome.warnings.end(), X.warnings.begin(), X.warnings.end());
    outcome.results.push_back(run_cv(X, target_vector(rated, X, config.target), config));
  }
  return outcome;
}

}  // namespace groove
