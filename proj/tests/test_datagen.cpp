#include "sdarl/datagen.hpp"

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sdarl/linalg.hpp"
#include "sdarl/rng.hpp"

using sdarl::gen_ar1_design;
using sdarl::gen_coef;
using sdarl::gen_linear_response;
using sdarl::gen_logistic_response;
using sdarl::GenSpec;
using sdarl::Index;
using sdarl::make_dataset;
using sdarl::SparseCoef;
using sdarl::split_rows;

namespace {

double column_corr(const Eigen::MatrixXd& x, Index a, Index b) {
  Eigen::VectorXd u = x.col(a).array() - x.col(a).mean();
  Eigen::VectorXd v = x.col(b).array() - x.col(b).mean();
  return u.dot(v) / (u.norm() * v.norm());
}

}  // namespace

TEST(Ar1Design, ColumnsNormalizedToSqrtN) {
  Eigen::MatrixXd x = gen_ar1_design(50, 7, 0.5, 1);
  for (Index j = 0; j < 7; ++j) EXPECT_NEAR(x.col(j).norm(), std::sqrt(50.0), 1e-9);
}

TEST(Ar1Design, IndependentColumnsAtRhoZero) {
  Eigen::MatrixXd x = gen_ar1_design(20000, 4, 0.0, 2);
  for (Index j = 0; j + 1 < 4; ++j) EXPECT_LT(std::abs(column_corr(x, j, j + 1)), 0.03);
}

TEST(Ar1Design, GeometricCorrelationProfile) {
  Eigen::MatrixXd x = gen_ar1_design(20000, 5, 0.5, 3);
  for (Index j = 0; j + 1 < 5; ++j) EXPECT_NEAR(column_corr(x, j, j + 1), 0.5, 0.02);
  EXPECT_NEAR(column_corr(x, 0, 2), 0.25, 0.03);
  EXPECT_NEAR(column_corr(x, 0, 3), 0.125, 0.03);
}

TEST(Ar1Design, MatchesExplicitCholeskyFactor) {
  // The scalar recursion must equal rows drawn as L * eps with L the
  // Cholesky factor of the geometric covariance, fed the same normal stream.
  const Index n = 200, p = 8;
  const double rho = 0.6;
  const std::uint64_t seed = 4;
  Eigen::MatrixXd cov(p, p);
  for (Index a = 0; a < p; ++a)
    for (Index b = 0; b < p; ++b) cov(a, b) = std::pow(rho, std::abs(a - b));
  Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

  sdarl::rng::Stream stream(sdarl::rng::stream_key(seed, 0, sdarl::rng::Purpose::design));
  Eigen::MatrixXd raw(n, p);
  for (Index i = 0; i < n; ++i) {
    Eigen::VectorXd eps(p);
    for (Index j = 0; j < p; ++j) eps[j] = stream.next_normal();
    raw.row(i) = (l * eps).transpose();
  }
  Eigen::MatrixXd expect = sdarl::normalize_columns(raw).matrix;
  Eigen::MatrixXd got = gen_ar1_design(n, p, rho, seed);
  EXPECT_LT((got - expect).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Ar1Design, DeterministicInSeed) {
  Eigen::MatrixXd a = gen_ar1_design(40, 6, 0.3, 5);
  Eigen::MatrixXd b = gen_ar1_design(40, 6, 0.3, 5);
  EXPECT_TRUE((a.array() == b.array()).all());
  Eigen::MatrixXd c = gen_ar1_design(40, 6, 0.3, 6);
  EXPECT_FALSE((a.array() == c.array()).all());
}

TEST(NeighborDesign, BoundaryColumnsInvariantToRho) {
  Eigen::MatrixXd a = sdarl::gen_neighbor_design(60, 9, 0.0, 7);
  Eigen::MatrixXd b = sdarl::gen_neighbor_design(60, 9, 0.6, 7);
  EXPECT_TRUE((a.col(0).array() == b.col(0).array()).all());
  EXPECT_TRUE((a.col(8).array() == b.col(8).array()).all());
  EXPECT_FALSE((a.col(4).array() == b.col(4).array()).all());
}

TEST(NeighborDesign, InteriorNeighborsCorrelate) {
  Eigen::MatrixXd x = sdarl::gen_neighbor_design(20000, 5, 0.5, 8);
  EXPECT_GT(column_corr(x, 1, 2), 0.3);
  Eigen::MatrixXd x0 = sdarl::gen_neighbor_design(20000, 5, 0.0, 8);
  EXPECT_LT(std::abs(column_corr(x0, 1, 2)), 0.03);
  for (Index j = 0; j < 5; ++j) EXPECT_NEAR(x.col(j).norm(), std::sqrt(20000.0), 1e-9);
}

TEST(NeighborDesign, RequiresThreeColumns) {
  EXPECT_THROW(sdarl::gen_neighbor_design(10, 2, 0.2, 1), std::invalid_argument);
}

TEST(GenCoef, UnitRatioPinsEveryValueToFloor) {
  SparseCoef coef = gen_coef(50, 8, 1.0, 1.0, 9);
  ASSERT_EQ(coef.entry_count(), 8);
  for (double v : coef.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(GenCoef, FloorAttainedExactlyAndRangeRespected) {
  const double m1 = 0.75;
  SparseCoef coef = gen_coef(100, 10, m1, 4.0, 10);
  double min_v = *std::min_element(coef.values.begin(), coef.values.end());
  EXPECT_DOUBLE_EQ(min_v, m1);  // one coordinate carries the floor exactly
  for (double v : coef.values) {
    EXPECT_GE(v, m1);
    EXPECT_LT(v, 4.0 * m1);
  }
  for (std::size_t i = 1; i < coef.indices.size(); ++i)
    EXPECT_LT(coef.indices[i - 1], coef.indices[i]);
}

TEST(GenCoef, FullSupportWhenKEqualsP) {
  SparseCoef coef = gen_coef(6, 6, 1.0, 2.0, 11);
  ASSERT_EQ(coef.entry_count(), 6);
  for (Index i = 0; i < 6; ++i) EXPECT_EQ(coef.indices[static_cast<std::size_t>(i)], i);
}

TEST(GenCoef, DeterministicAndSeedSensitive) {
  SparseCoef a = gen_coef(40, 5, 1.0, 3.0, 12);
  SparseCoef b = gen_coef(40, 5, 1.0, 3.0, 12);
  EXPECT_EQ(a, b);
  SparseCoef c = gen_coef(40, 5, 1.0, 3.0, 13);
  EXPECT_FALSE(a == c);
}

TEST(GenSpecFloor, MatchesFormulas) {
  GenSpec g;
  g.n = 100;
  g.p = 400;
  g.k = 5;
  EXPECT_DOUBLE_EQ(g.coef_floor(), 1.0);
  g.coef = sdarl::CoefKind::logfloor;
  EXPECT_DOUBLE_EQ(g.coef_floor(), 5.0 * std::sqrt(2.0 * std::log(400.0) / 100.0));
}

TEST(LinearResponse, NoiselessMatchesSupportSummation) {
  Eigen::MatrixXd x = gen_ar1_design(30, 12, 0.2, 14);
  SparseCoef coef = gen_coef(12, 3, 1.0, 5.0, 14);
  Eigen::VectorXd y = gen_linear_response(x, coef, 0.0, true, 14);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(30);
  for (std::size_t i = 0; i < coef.indices.size(); ++i)
    expect += coef.values[i] * x.col(coef.indices[i]);
  expect.array() += 1.0;
  EXPECT_TRUE((y.array() == expect.array()).all());
}

TEST(LinearResponse, NoiseStreamIsDeterministic) {
  Eigen::MatrixXd x = gen_ar1_design(25, 8, 0.2, 15);
  SparseCoef coef = gen_coef(8, 2, 1.0, 2.0, 15);
  Eigen::VectorXd a = gen_linear_response(x, coef, 0.7, true, 15);
  Eigen::VectorXd b = gen_linear_response(x, coef, 0.7, true, 15);
  EXPECT_TRUE((a.array() == b.array()).all());
  Eigen::VectorXd noiseless = gen_linear_response(x, coef, 0.0, true, 15);
  EXPECT_FALSE((a.array() == noiseless.array()).all());
}

TEST(LogisticResponse, BinaryAndBalancedUnderZeroSignal) {
  Eigen::MatrixXd x = gen_ar1_design(10000, 3, 0.0, 16);
  SparseCoef zero = SparseCoef::zeros(3);
  Eigen::VectorXd y = gen_logistic_response(x, zero, 16);
  double ones = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    ASSERT_TRUE(y[i] == 0.0 || y[i] == 1.0);
    ones += y[i];
  }
  EXPECT_NEAR(ones / 10000.0, 0.5, 0.04);
}

TEST(LogisticResponse, StrongMarginsFollowTheSign) {
  Eigen::MatrixXd x = gen_ar1_design(2000, 5, 0.0, 17);
  SparseCoef coef(5, {1}, {50.0});
  Eigen::VectorXd y = gen_logistic_response(x, coef, 17);
  Eigen::VectorXd margin = 50.0 * x.col(1);
  int agree = 0;
  for (Index i = 0; i < 2000; ++i)
    agree += (y[i] == 1.0) == (margin[i] > 0.0) ? 1 : 0;
  EXPECT_GT(agree, 1900);
}

TEST(SplitRows, RoundedSizesSortedDisjoint) {
  auto [train, test] = split_rows(300, 0.8, 18);
  EXPECT_EQ(train.size(), 240u);
  EXPECT_EQ(test.size(), 60u);
  EXPECT_TRUE(std::is_sorted(train.begin(), train.end()));
  EXPECT_TRUE(std::is_sorted(test.begin(), test.end()));
  std::vector<Index> all;
  std::merge(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(all));
  for (Index i = 0; i < 300; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);

  auto [t2, s2] = split_rows(10, 0.75, 18);
  EXPECT_EQ(t2.size(), 8u);  // round-half-away: 7.5 -> 8
  EXPECT_EQ(s2.size(), 2u);
}

TEST(MakeDataset, LinearHasNoSplitLogisticDoes) {
  GenSpec g;
  g.n = 40;
  g.p = 20;
  g.k = 3;
  g.seed = 19;
  auto lin = make_dataset(g);
  EXPECT_TRUE(lin.train_rows.empty());
  EXPECT_TRUE(lin.test_rows.empty());
  EXPECT_EQ(lin.true_support.size(), 3u);
  EXPECT_EQ(lin.true_coef.indices, lin.true_support);

  g.model = sdarl::Model::logistic;
  auto log = make_dataset(g);
  EXPECT_EQ(log.train_rows.size(), 32u);
  EXPECT_EQ(log.test_rows.size(), 8u);
  auto train_loss = sdarl::make_train_loss(log, g);
  EXPECT_TRUE(train_loss->is_classification());
  EXPECT_EQ(train_loss->sample_count(), 32);

  g.model = sdarl::Model::linear;
  auto lin_loss = sdarl::make_train_loss(lin, g);
  EXPECT_FALSE(lin_loss->is_classification());
  EXPECT_EQ(lin_loss->sample_count(), 40);
}

TEST(MakeDataset, DeterministicInSeed) {
  GenSpec g;
  g.n = 30;
  g.p = 25;
  g.k = 4;
  g.rho = 0.4;
  g.noise_sd = 0.5;
  g.seed = 20;
  auto a = make_dataset(g);
  auto b = make_dataset(g);
  EXPECT_TRUE((a.design.array() == b.design.array()).all());
  EXPECT_TRUE((a.response.array() == b.response.array()).all());
  EXPECT_EQ(a.true_coef, b.true_coef);
}

TEST(GenSpecValidate, RejectsBadFields) {
  GenSpec g;
  g.n = 40;
  g.p = 20;
  g.k = 3;
  g.validate();
  GenSpec bad = g;
  bad.n = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.k = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.k = 21;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.rho = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.signal_ratio = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.noise_sd = -0.1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.design = sdarl::DesignKind::neighbor;
  bad.p = 2;
  bad.k = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = g;
  bad.model = sdarl::Model::logistic;
  bad.train_fraction = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
