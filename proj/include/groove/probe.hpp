#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "groove/corpus.hpp"
#include "groove/embeddings.hpp"

namespace groove {

struct ProbeConfig {
  double alpha = 0.2;
  std::size_t folds = 4;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  bool standardize = true;
  Target target = Target::kGroove;
  // 0 selects default_thread_count().
  std::size_t threads = 0;

  // Throws InputError when alpha < 0, folds < 2, or seeds are empty or repeated.
  void validate() const;
};

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_stds;
  double target_mean = 0.0;
};

// Minimizes ||X w - y||^2 + alpha ||w||^2 by Cholesky factorization.
//
// With standardize, columns are z-scored with the statistics of X (columns
// of zero spread get weight 0), y is centered and the intercept restores
// original units; the intercept is not penalized. Without it the objective is
// solved exactly as written, with no intercept.
//
// When X has more columns than rows the equivalent n x n system
// (X X^T + alpha I) a = y, w = X^T a is factored instead.
RidgeModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                     bool standardize = true);

Eigen::VectorXd predict(const RidgeModel& model, const Eigen::MatrixXd& X);

// 1 - sum (pred - true)^2 / sum (mean(true) - true)^2. Can be negative.
double r2_score(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

// Shuffles 0..n-1 with SplitMix64(seed) and cuts k contiguous chunks; the
// first n % k chunks hold one extra index.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct ProbeResult {
  std::string representation_name;
  Target target = Target::kGroove;
  double alpha = 0.0;
  std::size_t folds = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_run_r2;
  double mean_r2 = 0.0;
  double std_r2 = 0.0;
  // Held-out prediction for each track, averaged over runs.
  std::map<std::string, double> predictions;
};

ProbeResult run_cv(const DesignMatrix& X, const Eigen::VectorXd& y, const ProbeConfig& config);

// Convenience: targets from the corpus in design-matrix row order.
Eigen::VectorXd target_vector(const Corpus& corpus, const DesignMatrix& X, Target target);

// Stem order of the isolated-instrument table.
inline constexpr std::array<std::string_view, 5> kStemTableOrder = {"vocals", "bass", "drums",
                                                                    "other", "full"};

struct StemProbeOutcome {
  std::vector<ProbeResult> results;
  std::vector<std::string> warnings;
};

// Probes `model` on every stem plus the full mix, in kStemTableOrder. Stems
// without embeddings are skipped with a warning.
StemProbeOutcome probe_all_stems(const Corpus& corpus, const std::string& model_name,
                                 const std::filesystem::path& embedding_root,
                                 const ProbeConfig& config);

}  // namespace groove
