#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "sdarl/types.hpp"

namespace sdarl {

// Result of sqrt(n)-column normalization: matrix.col(j) * scales[j] recovers
// the input column. With allow_zero_columns, all-zero columns are kept as-is
// (scale 1) and reported; otherwise they raise std::invalid_argument naming
// the first offending column.
struct ColumnScaling {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd scales;
  std::vector<Index> zero_columns;
};

ColumnScaling normalize_columns(const Eigen::MatrixXd& m, bool allow_zero_columns = false);

// The T entries of u largest in magnitude. Ties break toward the lower index,
// so the selection equals the first T entries of a stable sort by decreasing
// |u_i|. indices are returned in ascending order; threshold is the T-th
// largest magnitude (the smallest selected one).
struct TopTSelection {
  double threshold = 0.0;
  std::vector<Index> indices;
};

TopTSelection top_t_select(const Eigen::Ref<const Eigen::VectorXd>& u, Index t);

// Solve a x = b for symmetric positive semi-definite a. Uses Cholesky when a
// is definite; falls back to a rank-revealing complete orthogonal
// decomposition returning the minimum-norm least-squares solution otherwise.
// Throws std::invalid_argument when a is not square/symmetric.
Eigen::VectorXd solve_spd_min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace sdarl
