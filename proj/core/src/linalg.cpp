#include "sdarl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sdarl {

ColumnScaling normalize_columns(const Eigen::MatrixXd& m, bool allow_zero_columns) {
  const Index n = m.rows();
  const Index p = m.cols();
  ColumnScaling out;
  out.matrix = m;
  out.scales = Eigen::VectorXd::Ones(p);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < p; ++j) {
    double norm = m.col(j).norm();
    if (norm == 0.0) {
      if (!allow_zero_columns)
        throw std::invalid_argument("normalize_columns: column " + std::to_string(j) +
                                    " is identically zero");
      out.zero_columns.push_back(j);
      continue;
    }
    // Column j is scaled to Euclidean norm sqrt(n).
    double s = norm / root_n;
    out.matrix.col(j) /= s;
    out.scales[j] = s;
  }
  return out;
}

TopTSelection top_t_select(const Eigen::Ref<const Eigen::VectorXd>& u, Index t) {
  const Index p = u.size();
  if (t < 1 || t > p)
    throw std::invalid_argument("top_t_select: t must be in [1, dim]");
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto better = [&u](Index a, Index b) {
    double ma = std::abs(u[a]);
    double mb = std::abs(u[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + (t - 1), idx.end(), better);
  TopTSelection sel;
  sel.threshold = std::abs(u[idx[static_cast<std::size_t>(t - 1)]]);
  idx.resize(static_cast<std::size_t>(t));
  std::sort(idx.begin(), idx.end());
  sel.indices = std::move(idx);
  return sel;
}

Eigen::VectorXd solve_spd_min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("solve_spd_min_norm: matrix must be square");
  if (a.rows() != b.size())
    throw std::invalid_argument("solve_spd_min_norm: dimension mismatch");
  const Index t = a.rows();
  if (t == 0) return Eigen::VectorXd();
  double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw std::invalid_argument("solve_spd_min_norm: matrix is not symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd x = llt.solve(b);
    double resid = (a * x - b).norm();
    if (x.allFinite() && resid <= 1e-8 * std::max(1.0, b.norm())) return x;
  }

  // Semi-definite or ill-conditioned: minimum-norm least-squares solution.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(a);
  return cod.solve(b);
}

}  // namespace sdarl
