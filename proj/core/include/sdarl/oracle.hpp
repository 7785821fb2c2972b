#pragma once

#include <vector>

#include "sdarl/loss.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

// Caps for the exhaustive reference solver; instances beyond them are
// refused with std::invalid_argument.
struct OracleBudget {
  Index max_p = 14;
  Index max_t = 4;
  long long max_subsets = 10000;
};

struct BruteForceResult {
  std::vector<Index> support;  // lexicographically smallest among ties
  SparseCoef beta;
  double value = 0.0;
  long long subsets_checked = 0;
};

// Exact minimizer of F over supports of size exactly t, by enumeration of
// all C(p, t) subsets with the restricted subsolver on each.
BruteForceResult brute_force_best_support(const Loss& loss, Index t,
                                          const OracleBudget& budget = {});

// lambda values for which the hard threshold at level sqrt(2*lambda*tau)
// applied to beta + tau*d reproduces exactly supp(beta): the half-open
// interval (lo, hi]. empty when no such lambda exists.
struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;  // +inf for the zero model
  bool empty = true;
  double midpoint() const;  // an interior point of (lo, hi]
};

LambdaInterval admissible_lambda_interval(const Loss& loss, const SparseCoef& beta, double tau);

struct KktCertificate {
  bool pass = false;
  double residual = 0.0;
  double lambda = 0.0;
};

// Checks the fixed-point equations d = -grad F(beta),
// beta = H_{lambda tau}(beta + tau d) at the given lambda.
KktCertificate certify_kkt(const Loss& loss, const SparseCoef& beta, double tau, double lambda,
                           double tol = 1e-8);

// Central finite-difference gradient, step h per coordinate.
Eigen::VectorXd finite_diff_gradient(const Loss& loss, const SparseCoef& beta, double h = 1e-6);

}  // namespace sdarl
