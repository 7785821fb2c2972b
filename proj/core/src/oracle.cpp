#include "sdarl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdarl/solver.hpp"

namespace sdarl {

namespace {

long long binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (Index i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result < 0 || result > (1LL << 62)) return std::numeric_limits<long long>::max();
  }
  return result;
}

}  // namespace

BruteForceResult brute_force_best_support(const Loss& loss, Index t, const OracleBudget& budget) {
  const Index p = loss.dim();
  if (t < 1 || t > p) throw std::invalid_argument("brute_force: t must lie in [1, p]");
  if (p > budget.max_p || t > budget.max_t)
    throw std::invalid_argument("brute_force: instance exceeds the oracle budget");
  long long count = binomial(p, t);
  if (count > budget.max_subsets)
    throw std::invalid_argument("brute_force: too many subsets for the oracle budget");

  BruteForceResult best;
  best.value = std::numeric_limits<double>::infinity();

  std::vector<Index> support(static_cast<std::size_t>(t));
  for (Index i = 0; i < t; ++i) support[static_cast<std::size_t>(i)] = i;
  while (true) {
    RestrictedFit fit = loss.minimize_restricted(support);
    double value = loss.value(fit.beta);
    ++best.subsets_checked;
    if (value < best.value) {
      best.value = value;
      best.support = support;
      best.beta = fit.beta;
    }
    // Advance to the next lexicographic combination.
    Index j = t - 1;
    while (j >= 0 && support[static_cast<std::size_t>(j)] == p - t + j) --j;
    if (j < 0) break;
    ++support[static_cast<std::size_t>(j)];
    for (Index i = j + 1; i < t; ++i)
      support[static_cast<std::size_t>(i)] = support[static_cast<std::size_t>(i - 1)] + 1;
  }
  return best;
}

double LambdaInterval::midpoint() const {
  if (empty) throw std::logic_error("LambdaInterval::midpoint: empty interval");
  if (std::isinf(hi)) return 2.0 * lo + 1.0;
  return 0.5 * (lo + hi);
}

LambdaInterval admissible_lambda_interval(const Loss& loss, const SparseCoef& beta, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("admissible_lambda_interval: tau must be positive");
  Eigen::VectorXd d = -loss.gradient(beta);
  Eigen::VectorXd u = beta.to_dense() + tau * d;

  double min_on = std::numeric_limits<double>::infinity();
  double max_off = 0.0;
  std::size_t on_pos = 0;
  for (Index i = 0; i < u.size(); ++i) {
    bool on = on_pos < beta.indices.size() && beta.indices[on_pos] == i;
    if (on) {
      min_on = std::min(min_on, std::abs(u[i]));
      ++on_pos;
    } else {
      max_off = std::max(max_off, std::abs(u[i]));
    }
  }
  LambdaInterval out;
  if (beta.indices.empty()) {
    // Zero model: any level strictly above the largest |u_j| keeps it empty.
    out.lo = max_off * max_off / (2.0 * tau);
    out.hi = std::numeric_limits<double>::infinity();
    out.empty = false;
    return out;
  }
  if (!(max_off < min_on)) return out;  // empty
  out.lo = max_off * max_off / (2.0 * tau);
  out.hi = min_on * min_on / (2.0 * tau);
  out.empty = false;
  return out;
}

KktCertificate certify_kkt(const Loss& loss, const SparseCoef& beta, double tau, double lambda,
                           double tol) {
  KktCertificate cert;
  cert.lambda = lambda;
  cert.residual = kkt_residual(loss, beta, tau, lambda);
  cert.pass = cert.residual <= tol;
  return cert;
}

Eigen::VectorXd finite_diff_gradient(const Loss& loss, const SparseCoef& beta, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_gradient: h must be positive");
  Eigen::VectorXd dense = beta.to_dense();
  Eigen::VectorXd g(dense.size());
  for (Index i = 0; i < dense.size(); ++i) {
    Eigen::VectorXd hi = dense, lo = dense;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (loss.value(SparseCoef::from_dense(hi)) - loss.value(SparseCoef::from_dense(lo))) /
           (2.0 * h);
  }
  return g;
}

}  // namespace sdarl
