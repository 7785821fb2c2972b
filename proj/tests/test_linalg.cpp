#include "sdarl/linalg.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sdarl/rng.hpp"

using sdarl::Index;
using sdarl::normalize_columns;
using sdarl::solve_spd_min_norm;
using sdarl::top_t_select;

namespace {

Eigen::MatrixXd random_matrix(Index n, Index p, std::uint64_t seed) {
  sdarl::rng::Stream s(seed);
  Eigen::MatrixXd m(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = s.next_normal();
  return m;
}

// Reference selection: stable sort by decreasing magnitude, take the first t.
sdarl::TopTSelection top_t_reference(const Eigen::VectorXd& u, Index t) {
  std::vector<Index> order(u.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(u[a]) > std::abs(u[b]);
  });
  sdarl::TopTSelection sel;
  sel.indices.assign(order.begin(), order.begin() + t);
  sel.threshold = std::abs(u[sel.indices.back()]);
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel;
}

}  // namespace

TEST(NormalizeColumns, ScalesToSqrtN) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 1, 0;
  auto out = normalize_columns(m);
  // Column 0 already has norm sqrt(2); column 1 has norm 2 and shrinks.
  EXPECT_DOUBLE_EQ(out.matrix(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out.matrix(1, 0), 1.0);
  EXPECT_NEAR(out.matrix(0, 1), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(out.matrix(1, 1), 0.0);
  EXPECT_NEAR(out.scales[1], 2.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(out.zero_columns.empty());
  for (Index j = 0; j < 2; ++j)
    EXPECT_NEAR(out.matrix.col(j).norm(), std::sqrt(2.0), 1e-12);
}

TEST(NormalizeColumns, ScaleRecoversInput) {
  Eigen::MatrixXd m = random_matrix(17, 5, 3);
  auto out = normalize_columns(m);
  for (Index j = 0; j < 5; ++j)
    EXPECT_LT((out.matrix.col(j) * out.scales[j] - m.col(j)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(NormalizeColumns, Idempotent) {
  Eigen::MatrixXd m = random_matrix(20, 6, 5);
  auto once = normalize_columns(m);
  auto twice = normalize_columns(once.matrix);
  EXPECT_LT((twice.matrix - once.matrix).lpNorm<Eigen::Infinity>(), 1e-12);
  for (Index j = 0; j < 6; ++j) EXPECT_NEAR(twice.scales[j], 1.0, 1e-12);
}

TEST(NormalizeColumns, ZeroColumnThrowsNamingColumn) {
  Eigen::MatrixXd m = random_matrix(8, 4, 7);
  m.col(2).setZero();
  try {
    normalize_columns(m);
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(NormalizeColumns, AllowZeroKeepsAndReports) {
  Eigen::MatrixXd m = random_matrix(8, 4, 9);
  m.col(1).setZero();
  m.col(3).setZero();
  auto out = normalize_columns(m, true);
  EXPECT_EQ(out.zero_columns, (std::vector<Index>{1, 3}));
  EXPECT_DOUBLE_EQ(out.scales[1], 1.0);
  EXPECT_DOUBLE_EQ(out.matrix.col(3).norm(), 0.0);
  EXPECT_NEAR(out.matrix.col(0).norm(), std::sqrt(8.0), 1e-12);
}

TEST(TopTSelect, BasicMagnitudeOrder) {
  Eigen::VectorXd u(3);
  u << 3, -5, 2;
  auto sel = top_t_select(u, 2);
  EXPECT_EQ(sel.indices, (std::vector<Index>{0, 1}));
  EXPECT_DOUBLE_EQ(sel.threshold, 3.0);
}

TEST(TopTSelect, TiesBreakTowardLowerIndex) {
  Eigen::VectorXd u(3);
  u << 2, -2, 1;
  auto sel = top_t_select(u, 1);
  EXPECT_EQ(sel.indices, (std::vector<Index>{0}));
  EXPECT_DOUBLE_EQ(sel.threshold, 2.0);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  auto sel2 = top_t_select(ones, 2);
  EXPECT_EQ(sel2.indices, (std::vector<Index>{0, 1}));
  EXPECT_DOUBLE_EQ(sel2.threshold, 1.0);
}

TEST(TopTSelect, FullSelection) {
  Eigen::VectorXd u(4);
  u << -1, 0, 3, 2;
  auto sel = top_t_select(u, 4);
  EXPECT_EQ(sel.indices, (std::vector<Index>{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(sel.threshold, 0.0);
}

TEST(TopTSelect, MatchesStableSortReference) {
  sdarl::rng::Stream s(101);
  for (int trial = 0; trial < 400; ++trial) {
    Index p = 3 + static_cast<Index>(s.next_below(40));
    Eigen::VectorXd u(p);
    // Quantized magnitudes force frequent ties.
    for (Index i = 0; i < p; ++i) u[i] = std::round(s.next_uniform(-3.0, 3.0) * 4.0) / 4.0;
    Index t = 1 + static_cast<Index>(s.next_below(static_cast<std::uint64_t>(p)));
    auto got = top_t_select(u, t);
    auto want = top_t_reference(u, t);
    ASSERT_EQ(got.indices, want.indices) << "trial " << trial;
    ASSERT_DOUBLE_EQ(got.threshold, want.threshold) << "trial " << trial;
  }
}

TEST(TopTSelect, RejectsBadT) {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(top_t_select(u, 0), std::invalid_argument);
  EXPECT_THROW(top_t_select(u, 4), std::invalid_argument);
}

TEST(SolveSpd, Identity) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << 1, 2;
  Eigen::VectorXd x = solve_spd_min_norm(a, b);
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 2.0, 1e-14);
}

TEST(SolveSpd, SingularReturnsMinNorm) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 1;
  Eigen::VectorXd b(2);
  b << 2, 2;
  Eigen::VectorXd x = solve_spd_min_norm(a, b);
  // Solutions are x0 + x1 = 2; the minimum-norm one is (1, 1).
  EXPECT_NEAR(x[0], 1.0, 1e-10);
  EXPECT_NEAR(x[1], 1.0, 1e-10);
}

TEST(SolveSpd, DefiniteSystemsSolveToResidualTolerance) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    Eigen::MatrixXd g = random_matrix(12, 6, 200 + seed);
    Eigen::MatrixXd a = g.transpose() * g + 0.1 * Eigen::MatrixXd::Identity(6, 6);
    Eigen::VectorXd b = random_matrix(6, 1, 300 + seed);
    Eigen::VectorXd x = solve_spd_min_norm(a, b);
    EXPECT_LT((a * x - b).norm(), 1e-10 * std::max(1.0, b.norm()));
  }
}

TEST(SolveSpd, MinNormSolutionOrthogonalToNullSpace) {
  // Rank-deficient PSD system with a consistent right-hand side: the
  // minimum-norm solution must be orthogonal to every null eigenvector.
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    Eigen::MatrixXd g = random_matrix(3, 7, 400 + seed);  // rank <= 3
    Eigen::MatrixXd a = g.transpose() * g;
    Eigen::VectorXd x_any = random_matrix(7, 1, 500 + seed);
    Eigen::VectorXd b = a * x_any;
    Eigen::VectorXd x = solve_spd_min_norm(a, b);
    EXPECT_LT((a * x - b).norm(), 1e-8 * std::max(1.0, b.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    for (Index i = 0; i < 7; ++i)
      if (eig.eigenvalues()[i] < 1e-10)
        EXPECT_LT(std::abs(eig.eigenvectors().col(i).dot(x)), 1e-8);
  }
}

TEST(SolveSpd, RejectsNonSymmetric) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 0, 1;
  Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(solve_spd_min_norm(a, b), std::invalid_argument);
}

TEST(SolveSpd, RejectsNonSquare) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 3);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(solve_spd_min_norm(a, b), std::invalid_argument);
}
