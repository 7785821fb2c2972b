#include "sdarl/tuning.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sdarl/datagen.hpp"
#include "sdarl/loss.hpp"
#include "sdarl/rng.hpp"

using sdarl::Criterion;
using sdarl::cv_score;
using sdarl::fit_asdarl;
using sdarl::fit_sdarl;
using sdarl::hbic_score;
using sdarl::Index;
using sdarl::LinearLoss;
using sdarl::LogisticLoss;
using sdarl::SolverConfig;
using sdarl::SparseCoef;
using sdarl::TuningConfig;

namespace {

sdarl::Dataset linear_data(Index n, Index p, Index k, double noise, std::uint64_t seed,
                           double rho = 0.2) {
  sdarl::GenSpec g;
  g.n = n;
  g.p = p;
  g.k = k;
  g.rho = rho;
  g.signal_ratio = 10.0;
  g.noise_sd = noise;
  g.seed = seed;
  return sdarl::make_dataset(g);
}

sdarl::FitResult zero_fit(Index p) {
  sdarl::FitResult fit;
  fit.beta = SparseCoef::zeros(p);
  return fit;
}

}  // namespace

TEST(Hbic, LogisticZeroModelIsTwoNLogTwo) {
  sdarl::rng::Stream s(1);
  Eigen::MatrixXd x(8, 4);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 8; ++i) x(i, j) = s.next_normal();
  Eigen::VectorXd y(8);
  y << 1, 0, 1, 0, 0, 1, 1, 0;
  LogisticLoss loss(x, y);
  EXPECT_DOUBLE_EQ(hbic_score(loss, zero_fit(4), 8, 4), 16.0 * std::log(2.0));
}

TEST(Hbic, LinearFormulaMatchesDirectEvaluation) {
  auto data = linear_data(60, 30, 4, 0.5, 2);
  LinearLoss loss(data.design, data.response);
  SolverConfig cfg;
  cfg.target_size = 4;
  auto fit = fit_sdarl(loss, cfg);
  double f = loss.value(fit.beta);
  double df = static_cast<double>(fit.beta.count_nonzero(1e-10));
  double expect = 60.0 * std::log(2.0 * f) + df * std::log(std::log(60.0)) * std::log(30.0);
  EXPECT_DOUBLE_EQ(hbic_score(loss, fit, 60, 30), expect);
}

TEST(Hbic, EqualLossLargerSupportScoresWorse) {
  // Duplicate the design columns: spreading each weight across a column and
  // its copy reproduces the fitted values exactly, so only df moves the score.
  sdarl::rng::Stream s(3);
  Eigen::MatrixXd base(20, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 20; ++i) base(i, j) = s.next_normal();
  Eigen::MatrixXd x(20, 6);
  x << base, base;
  Eigen::VectorXd y = base * Eigen::Vector3d(1.0, -2.0, 0.5);
  y.array() += 1.0;
  for (Index i = 0; i < 20; ++i) y[i] += 0.3 * s.next_normal();
  LinearLoss loss(x, y, true);

  sdarl::FitResult small = zero_fit(6);
  small.beta = SparseCoef(6, {0, 1, 2}, {1.0, -2.0, 0.5});
  sdarl::FitResult wide = zero_fit(6);
  wide.beta = SparseCoef(6, {0, 1, 2, 3, 4, 5}, {0.5, -1.0, 0.25, 0.5, -1.0, 0.25});

  ASSERT_NEAR(loss.value(small.beta), loss.value(wide.beta), 1e-14);
  EXPECT_LT(hbic_score(loss, small, 20, 6), hbic_score(loss, wide, 20, 6));
}

TEST(Hbic, PerfectLinearFitScoresMinusInfinity) {
  // Single-column response with no intercept: the residual cancels exactly in
  // floating point, so F is 0.0 and the score must be the -inf sentinel.
  sdarl::rng::Stream s(4);
  Eigen::MatrixXd x(30, 8);
  for (Index j = 0; j < 8; ++j)
    for (Index i = 0; i < 30; ++i) x(i, j) = s.next_normal();
  Eigen::VectorXd y = 2.5 * x.col(3);
  LinearLoss loss(x, y, false);
  sdarl::FitResult fit = zero_fit(8);
  fit.beta = SparseCoef(8, {3}, {2.5});
  ASSERT_EQ(loss.value(fit.beta), 0.0);
  EXPECT_EQ(hbic_score(loss, fit, 30, 8), -std::numeric_limits<double>::infinity());
}

TEST(CvScore, LeaveOneOutMatchesDirectEnumeration) {
  // With folds = n each fold holds out exactly one row, whatever the
  // shuffle, so the direct per-row enumeration is an exact reference.
  auto data = linear_data(10, 6, 2, 0.3, 5);
  LinearLoss loss(data.design, data.response);
  SolverConfig base;
  base.target_size = 2;

  double got = cv_score(loss, 2, 10, 77, base);

  double total = 0.0;
  for (Index held = 0; held < 10; ++held) {
    std::vector<Index> train_rows;
    for (Index i = 0; i < 10; ++i)
      if (i != held) train_rows.push_back(i);
    auto train = loss.subset_rows(train_rows);
    SolverConfig cfg = base;
    auto fit = fit_sdarl(*train, cfg);
    std::vector<Index> test_rows{held};
    auto test = loss.subset_rows(test_rows);
    total += 2.0 * test->value(fit.beta);
  }
  EXPECT_NEAR(got, total / 10.0, 1e-10);
}

TEST(CvScore, ZeroTargetScoresZeroModel) {
  auto data = linear_data(12, 5, 2, 0.4, 6);
  LinearLoss loss(data.design, data.response);
  SolverConfig base;
  base.target_size = 1;
  double got = cv_score(loss, 0, 12, 9, base);
  // Leave-one-out of the zero model: squared residual of each held-out row
  // against the bare intercept.
  double total = 0.0;
  for (Index i = 0; i < 12; ++i) {
    double r = 1.0 - data.response[i];
    total += r * r;
  }
  EXPECT_NEAR(got, total / 12.0, 1e-12);
}

TEST(CvScore, DeterministicInSeed) {
  auto data = linear_data(30, 12, 3, 0.5, 7);
  LinearLoss loss(data.design, data.response);
  SolverConfig base;
  base.target_size = 3;
  EXPECT_EQ(cv_score(loss, 3, 5, 123, base), cv_score(loss, 3, 5, 123, base));
}

TEST(CvScore, LogisticFoldLosingClassIsSkipped) {
  sdarl::rng::Stream s(8);
  Eigen::MatrixXd x(8, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 8; ++i) x(i, j) = s.next_normal();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(8);
  y[3] = 1.0;  // single positive: exactly one training fold goes one-class
  LogisticLoss loss(x, y);
  SolverConfig base;
  base.target_size = 1;
  double score = cv_score(loss, 1, 4, 11, base);
  EXPECT_TRUE(std::isfinite(score));
}

TEST(CvScore, AllFoldsSkippedThrows) {
  sdarl::rng::Stream s(9);
  Eigen::MatrixXd x(6, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index i = 0; i < 6; ++i) x(i, j) = s.next_normal();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);  // one class everywhere
  LogisticLoss loss(x, y);
  SolverConfig base;
  base.target_size = 1;
  EXPECT_THROW(cv_score(loss, 1, 3, 13, base), std::runtime_error);
}

TEST(FitAsdarl, SweepGridAndStopRule) {
  // n = 800 gives floor(n / ln n) = 119; with stride 50 the fitted sizes are
  // 50, 100, then 150 as the first entry past the bound.
  auto data = linear_data(800, 160, 5, 0.5, 10);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 50;
  cfg.criterion = Criterion::hbic;
  auto path = fit_asdarl(loss, cfg);
  EXPECT_EQ(path.sweep_bound, 119);
  ASSERT_EQ(path.entries.size(), 4u);
  EXPECT_EQ(path.entries[0].target_size, 0);
  EXPECT_EQ(path.entries[1].target_size, 50);
  EXPECT_EQ(path.entries[2].target_size, 100);
  EXPECT_EQ(path.entries[3].target_size, 150);
}

TEST(FitAsdarl, BoundBelowStrideStillFitsOneEntry) {
  auto data = linear_data(20, 15, 2, 0.3, 11);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 10;  // floor(20 / ln 20) = 6 < alpha
  auto path = fit_asdarl(loss, cfg);
  EXPECT_EQ(path.sweep_bound, 6);
  ASSERT_EQ(path.entries.size(), 2u);
  EXPECT_EQ(path.entries[1].target_size, 10);
}

TEST(FitAsdarl, ColumnCountCapsTheSweep) {
  auto data = linear_data(100, 12, 2, 0.3, 12);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 5;
  cfg.q = 100;  // explicit bound beyond p: the column count must cap the grid
  auto path = fit_asdarl(loss, cfg);
  EXPECT_EQ(path.sweep_bound, 100);
  ASSERT_EQ(path.entries.size(), 3u);
  EXPECT_EQ(path.entries[1].target_size, 5);
  EXPECT_EQ(path.entries[2].target_size, 10);
}

TEST(FitAsdarl, HeadEntryAndSelectionWiring) {
  auto data = linear_data(120, 60, 5, 0.3, 13);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 1;
  auto path = fit_asdarl(loss, cfg);
  ASSERT_GT(path.entries.size(), 5u);
  EXPECT_EQ(path.entries[0].target_size, 0);
  EXPECT_EQ(path.entries[0].fit.beta.entry_count(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < path.entries.size(); ++i) {
    EXPECT_FALSE(std::isnan(path.entries[i].criterion_value));
    if (path.entries[i].criterion_value < path.entries[best].criterion_value) best = i;
  }
  EXPECT_EQ(path.selected, best);
  // The zero model fits worse than the chosen entry on a real signal.
  EXPECT_GT(path.entries[0].criterion_value, path.entries[path.selected].criterion_value);
}

TEST(FitAsdarl, HbicSelectsTruthOnEasyInstance) {
  auto data = linear_data(300, 80, 5, 0.3, 14);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 1;
  auto path = fit_asdarl(loss, cfg);
  const auto& chosen = path.entries[path.selected];
  EXPECT_EQ(chosen.target_size, 5);
  EXPECT_EQ(chosen.fit.active_set, data.true_support);
}

TEST(FitAsdarl, CvSelectionCoversTruth) {
  auto data = linear_data(90, 40, 4, 0.2, 15);
  LinearLoss loss(data.design, data.response);
  TuningConfig cfg;
  cfg.alpha = 1;
  cfg.criterion = Criterion::cv;
  cfg.cv_folds = 5;
  cfg.cv_seed = 21;
  auto path = fit_asdarl(loss, cfg);
  const auto& chosen = path.entries[path.selected];
  EXPECT_GE(chosen.target_size, 4);
  std::vector<Index> est = chosen.fit.active_set;
  for (Index i : data.true_support)
    EXPECT_TRUE(std::binary_search(est.begin(), est.end(), i));
}

TEST(FitAsdarl, WarmStartsDoNotInflateIterations) {
  long warm_total = 0, cold_total = 0;
  for (std::uint64_t seed = 30; seed < 50; ++seed) {
    auto data = linear_data(100, 50, 4, 0.4, seed);
    LinearLoss loss(data.design, data.response);
    TuningConfig cfg;
    cfg.alpha = 2;
    auto path = fit_asdarl(loss, cfg);
    for (const auto& entry : path.entries) warm_total += entry.fit.iterations;
    for (const auto& entry : path.entries) {
      if (entry.target_size == 0) continue;
      SolverConfig sc = cfg.solver;
      sc.target_size = entry.target_size;
      cold_total += fit_sdarl(loss, sc).iterations;
    }
  }
  EXPECT_LE(warm_total, static_cast<long>(1.5 * static_cast<double>(cold_total)) + 2);
}

TEST(TuningConfig, ValidateRejectsBadFields) {
  TuningConfig cfg;
  cfg.validate(100, 50);
  TuningConfig bad = cfg;
  bad.alpha = 0;
  EXPECT_THROW(bad.validate(100, 50), std::invalid_argument);
  bad = cfg;
  bad.q = -1;
  EXPECT_THROW(bad.validate(100, 50), std::invalid_argument);
  bad = cfg;
  bad.criterion = Criterion::cv;
  bad.cv_folds = 1;
  EXPECT_THROW(bad.validate(100, 50), std::invalid_argument);
  bad.cv_folds = 101;
  EXPECT_THROW(bad.validate(100, 50), std::invalid_argument);
}

TEST(CvScore, RejectsBadArguments) {
  auto data = linear_data(10, 5, 2, 0.3, 16);
  LinearLoss loss(data.design, data.response);
  SolverConfig base;
  base.target_size = 2;
  EXPECT_THROW(cv_score(loss, 2, 1, 1, base), std::invalid_argument);
  EXPECT_THROW(cv_score(loss, 2, 11, 1, base), std::invalid_argument);
  EXPECT_THROW(cv_score(loss, -1, 5, 1, base), std::invalid_argument);
  EXPECT_THROW(cv_score(loss, 6, 5, 1, base), std::invalid_argument);
}
