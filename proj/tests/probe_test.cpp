#include "groove/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "groove/error.hpp"
#include "groove/prng.hpp"
#include "test_util.hpp"

namespace groove {
namespace {

using testing::gaussian_matrix;
using testing::gaussian_vector;

DesignMatrix design(const Eigen::MatrixXd& rows, const std::string& name = "synthetic") {
  DesignMatrix dm;
  dm.representation_name = name;
  dm.rows = rows;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "t%04d", static_cast<int>(i));
    dm.row_ids.emplace_back(id);
  }
  return dm;
}

ProbeConfig literal_config(double alpha) {
  ProbeConfig c;
  c.alpha = alpha;
  c.standardize = false;
  return c;
}

TEST(FitRidge, HandSolvedScalar) {
  const RidgeModel m = fit_ridge(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Constant(1, 2.0), 0.2, false);
  EXPECT_NEAR(m.weights(0), 2.0 / 1.2, 1e-12);
  EXPECT_EQ(m.intercept, 0.0);
  EXPECT_NEAR(predict(m, Eigen::MatrixXd::Constant(1, 1, 1.0))(0), 1.66667, 1e-5);
}

TEST(FitRidge, OrthonormalDesignAtZeroAlpha) {
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian_matrix(12, 5, 3)).householderQ() *
                            Eigen::MatrixXd::Identity(12, 5);
  ASSERT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  // y in the column space so the interpolation check is exact.
  const Eigen::VectorXd y = q * gaussian_vector(5, 4);
  const RidgeModel m = fit_ridge(q, y, 0.0, false);
  EXPECT_LT((m.weights - q.transpose() * y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((predict(m, q) - y).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitRidge, HugePenaltyShrinksToZero) {
  const RidgeModel m = fit_ridge(gaussian_matrix(10, 3, 1), gaussian_vector(10, 2), 1e9, false);
  EXPECT_LT(m.weights.norm(), 1e-6);
}

TEST(FitRidge, NormNonIncreasingInAlpha) {
  const Eigen::MatrixXd X = gaussian_matrix(30, 8, 5);
  const Eigen::VectorXd y = gaussian_vector(30, 6);
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {0.0, 1e-3, 0.1, 0.2, 1.0, 5.0, 50.0, 1e3, 1e6}) {
    const double norm = fit_ridge(X, y, alpha, false).weights.norm();
    EXPECT_LE(norm, previous * (1 + 1e-12)) << alpha;
    previous = norm;
  }
}

TEST(FitRidge, MatchesGradientDescentOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Eigen::MatrixXd X = gaussian_matrix(50, 20, 100 + seed);
    const Eigen::VectorXd y = gaussian_vector(50, 200 + seed);
    for (double alpha : {0.0, 0.2, 10.0}) {
      const Eigen::VectorXd w = fit_ridge(X, y, alpha, false).weights;
      const Eigen::VectorXd oracle = testing::gradient_descent_ridge(X, y, alpha);
      EXPECT_LT((w - oracle).cwiseAbs().maxCoeff(), 1e-6) << seed << " " << alpha;
    }
  }
}

TEST(FitRidge, WideDesignMatchesOracle) {
  const Eigen::MatrixXd X = gaussian_matrix(15, 40, 8);
  const Eigen::VectorXd y = gaussian_vector(15, 9);
  const Eigen::VectorXd w = fit_ridge(X, y, 0.5, false).weights;
  EXPECT_LT((w - testing::gradient_descent_ridge(X, y, 0.5)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitRidge, LocallyOptimal) {
  const Eigen::MatrixXd X = gaussian_matrix(40, 10, 21);
  const Eigen::VectorXd y = gaussian_vector(40, 22);
  const double alpha = 0.2;
  const Eigen::VectorXd w = fit_ridge(X, y, alpha, false).weights;
  const double best = testing::ridge_objective(X, y, alpha, w);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd delta = gaussian_vector(10, 5000 + static_cast<std::uint64_t>(i));
    delta *= 1e-3 / delta.norm();
    ASSERT_LE(best, testing::ridge_objective(X, y, alpha, w + delta)) << i;
  }
}

TEST(FitRidge, StandardizedPredictAtMeansGivesTargetMean) {
  Eigen::MatrixXd X = gaussian_matrix(25, 6, 31);
  X.col(2).array() = X.col(2).array() * 1000.0 + 5.0;
  X.col(4).setConstant(3.0);  // zero spread, dropped
  const Eigen::VectorXd y = gaussian_vector(25, 32).array() + 7.0;
  const RidgeModel m = fit_ridge(X, y, 0.2, true);
  EXPECT_NEAR(m.target_mean, y.mean(), 1e-12);
  EXPECT_EQ(m.weights(4), 0.0);
  EXPECT_GT(m.feature_stds.minCoeff(), 0.0);
  const Eigen::MatrixXd at_means = m.feature_means.transpose().replicate(4, 1);
  for (double p : predict(m, at_means)) EXPECT_NEAR(p, m.target_mean, 1e-10);
}

TEST(FitRidge, Errors) {
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 2, 4, 3, 6;
  EXPECT_THROW(fit_ridge(X, Eigen::VectorXd::Ones(3), 0.0, false), NumericalError);
  EXPECT_NO_THROW(fit_ridge(X, Eigen::VectorXd::Ones(3), 0.1, false));
  EXPECT_THROW(fit_ridge(gaussian_matrix(4, 9, 1), gaussian_vector(4, 2), 0.0, false), NumericalError);
  EXPECT_THROW(fit_ridge(X, Eigen::VectorXd::Ones(2), 0.1, false), InputError);
  EXPECT_THROW(fit_ridge(X, Eigen::VectorXd::Ones(3), -1.0, false), InputError);
  X(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(fit_ridge(X, Eigen::VectorXd::Ones(3), 0.1, false), NumericalError);
  const RidgeModel m = fit_ridge(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), 0.1, false);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Ones(2, 4)), InputError);
}

TEST(R2Score, ClosedForms) {
  Eigen::VectorXd y(3), p(3);
  y << 1, 2, 3;
  p << 1, 2, 2;
  EXPECT_EQ(r2_score(y, y), 1.0);
  EXPECT_NEAR(r2_score(y, Eigen::VectorXd::Constant(3, 2.0)), 0.0, 1e-12);
  EXPECT_NEAR(r2_score(y, p), 0.5, 1e-12);
  EXPECT_LT(r2_score(y, -y), 0.0);
  EXPECT_THROW(r2_score(Eigen::VectorXd::Constant(3, 1.0), p), NumericalError);
  EXPECT_THROW(r2_score(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)), InputError);
}

TEST(KFoldSplit, PartitionAndSizes) {
  const auto folds = kfold_split(8, 4, 0);
  ASSERT_EQ(folds.size(), 4u);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 2u);
    all.insert(f.begin(), f.end());
  }
  EXPECT_EQ(all.size(), 8u);
  EXPECT_EQ(*all.rbegin(), 7u);

  for (const auto& f : kfold_split(148, 4, 3)) EXPECT_EQ(f.size(), 37u);
  const auto uneven = kfold_split(10, 4, 1);
  EXPECT_EQ(uneven[0].size(), 3u);
  EXPECT_EQ(uneven[1].size(), 3u);
  EXPECT_EQ(uneven[2].size(), 2u);
  EXPECT_EQ(uneven[3].size(), 2u);

  EXPECT_EQ(kfold_split(148, 4, 9), kfold_split(148, 4, 9));
  EXPECT_NE(kfold_split(148, 4, 9), kfold_split(148, 4, 10));
  EXPECT_THROW(kfold_split(3, 4, 0), InputError);
  EXPECT_THROW(kfold_split(10, 1, 0), InputError);
}

TEST(KFoldSplit, FollowsDocumentedShuffle) {
  std::vector<std::size_t> order(11);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(77);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.bounded(i + 1)]);
  const auto folds = kfold_split(11, 3, 77);
  std::vector<std::size_t> flat;
  for (const auto& f : folds) flat.insert(flat.end(), f.begin(), f.end());
  EXPECT_EQ(flat, order);
}

TEST(RunCv, NoiselessRecovery) {
  const Eigen::MatrixXd X = gaussian_matrix(148, 32, 1);
  const Eigen::VectorXd y = X * gaussian_vector(32, 2);
  const ProbeResult r = run_cv(design(X), y, literal_config(1e-8));
  EXPECT_GE(r.mean_r2, 0.99);
  EXPECT_EQ(r.per_run_r2.size(), 5u);
  EXPECT_EQ(r.predictions.size(), 148u);
  EXPECT_EQ(r.folds, 4u);
  EXPECT_EQ(r.representation_name, "synthetic");
}

TEST(RunCv, AggregatesPerRunScores) {
  const Eigen::MatrixXd X = gaussian_matrix(40, 3, 11);
  const Eigen::VectorXd y = X * gaussian_vector(3, 12) + gaussian_vector(40, 13);
  const ProbeResult r = run_cv(design(X), y, ProbeConfig{});
  const double mean = std::accumulate(r.per_run_r2.begin(), r.per_run_r2.end(), 0.0) / 5.0;
  double var = 0;
  for (double v : r.per_run_r2) var += (v - mean) * (v - mean);
  EXPECT_NEAR(r.mean_r2, mean, 1e-15);
  EXPECT_NEAR(r.std_r2, std::sqrt(var / 5.0), 1e-15);

  // Run 0 recomputed by hand from the documented fold procedure.
  const auto folds = kfold_split(40, 4, 0);
  double fold_sum = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t g = 0; g < 4; ++g)
      for (std::size_t i : folds[g]) (g == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    const RidgeModel m = fit_ridge(X(train, Eigen::all), y(train), 0.2, true);
    fold_sum += r2_score(y(test), predict(m, X(test, Eigen::all)));
  }
  EXPECT_NEAR(r.per_run_r2[0], fold_sum / 4.0, 1e-12);
}

TEST(RunCv, PermutationNull) {
  const Eigen::MatrixXd X = gaussian_matrix(148, 32, 41);
  const Eigen::VectorXd y = X * gaussian_vector(32, 42);
  double total = 0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    std::vector<std::size_t> perm(148);
    std::iota(perm.begin(), perm.end(), 0);
    SplitMix64 rng(1000 + p);
    shuffle(perm, rng);
    Eigen::VectorXd shuffled(148);
    for (Eigen::Index i = 0; i < 148; ++i) shuffled(i) = y(static_cast<Eigen::Index>(perm[i]));
    total += run_cv(design(X), shuffled, ProbeConfig{}).mean_r2;
  }
  EXPECT_LT(total / 20.0, 0.05);
}

TEST(RunCv, BitDeterministicAcrossThreadCounts) {
  const Eigen::MatrixXd X = gaussian_matrix(60, 12, 51);
  const Eigen::VectorXd y = X * gaussian_vector(12, 52) + gaussian_vector(60, 53);
  ProbeConfig one;
  one.threads = 1;
  ProbeConfig eight;
  eight.threads = 8;
  const ProbeResult a = run_cv(design(X), y, one);
  const ProbeResult b = run_cv(design(X), y, eight);
  const ProbeResult c = run_cv(design(X), y, eight);
  EXPECT_EQ(a.per_run_r2, b.per_run_r2);
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_EQ(b.per_run_r2, c.per_run_r2);
  EXPECT_EQ(a.mean_r2, b.mean_r2);
  EXPECT_EQ(a.std_r2, b.std_r2);
}

TEST(RunCv, TargetShiftLeavesStandardizedScoreUnchanged) {
  const Eigen::MatrixXd X = gaussian_matrix(50, 6, 61);
  const Eigen::VectorXd y = X * gaussian_vector(6, 62) + gaussian_vector(50, 63);
  const ProbeResult a = run_cv(design(X), y, ProbeConfig{});
  const ProbeResult b = run_cv(design(X), y.array() + 42.0, ProbeConfig{});
  for (std::size_t i = 0; i < a.per_run_r2.size(); ++i) EXPECT_NEAR(a.per_run_r2[i], b.per_run_r2[i], 1e-10);
}

TEST(RunCv, RejectsBadInputs) {
  const Eigen::MatrixXd X = gaussian_matrix(10, 2, 1);
  EXPECT_THROW(run_cv(design(X), Eigen::VectorXd::Zero(9), ProbeConfig{}), InputError);
  ProbeConfig bad;
  bad.seeds = {1, 1};
  EXPECT_THROW(run_cv(design(X), gaussian_vector(10, 2), bad), InputError);
  bad = ProbeConfig{};
  bad.folds = 11;
  EXPECT_THROW(run_cv(design(X), gaussian_vector(10, 2), bad), InputError);
  // A test fold with constant targets is flagged.
  EXPECT_THROW(run_cv(design(X), Eigen::VectorXd::Constant(10, 3.0), ProbeConfig{}), NumericalError);
}

class StemCorpus : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::size_t n = 24;
    std::vector<Track> tracks;
    std::vector<RatingSet> ratings;
    const Eigen::MatrixXd base = gaussian_matrix(static_cast<Eigen::Index>(n), 512, 71);
    const Eigen::VectorXd z = base.col(0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "s" + std::to_string(100 + i);
      tracks.push_back({id, id, std::nullopt, "unused.wav", {}});
      ratings.push_back({id, 50, 50, 50, z(static_cast<Eigen::Index>(i)) / 4.0});
      for (std::string_view stem : kStemTableOrder) {
        const auto d = dir.path() / "muq" / std::string(stem);
        std::filesystem::create_directories(d);
        write_embedding_csv(d / (id + ".csv"), base.row(static_cast<Eigen::Index>(i)));
      }
    }
    corpus = Corpus(tracks, ratings);
  }
  testing::TempDir dir{"stems"};
  Corpus corpus;
};

TEST_F(StemCorpus, AllSourcesInTableOrder) {
  const StemProbeOutcome out = probe_all_stems(corpus, "muq", dir.path(), ProbeConfig{});
  ASSERT_EQ(out.results.size(), 5u);
  EXPECT_EQ(out.results[0].representation_name, "muq/vocals");
  EXPECT_EQ(out.results[1].representation_name, "muq/bass");
  EXPECT_EQ(out.results[2].representation_name, "muq/drums");
  EXPECT_EQ(out.results[3].representation_name, "muq/other");
  EXPECT_EQ(out.results[4].representation_name, "muq");
  EXPECT_TRUE(out.warnings.empty());
  // Identical embeddings everywhere give identical scores.
  for (const auto& r : out.results) EXPECT_EQ(r.mean_r2, out.results[0].mean_r2);
}

TEST_F(StemCorpus, MissingDrumsSkippedWithWarning) {
  std::filesystem::remove_all(dir.path() / "muq" / "drums");
  const StemProbeOutcome out = probe_all_stems(corpus, "muq", dir.path(), ProbeConfig{});
  ASSERT_EQ(out.results.size(), 4u);
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_NE(out.warnings[0].find("drums"), std::string::npos);
  EXPECT_EQ(out.results[2].representation_name, "muq/other");
}

}  // namespace
}  // namespace groove
