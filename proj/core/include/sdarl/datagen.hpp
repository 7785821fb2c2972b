#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "sdarl/loss.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

enum class Model { linear, logistic };
enum class DesignKind { ar1, neighbor };
enum class CoefKind { unit_floor, logfloor };

const char* to_string(Model m);
const char* to_string(DesignKind d);
const char* to_string(CoefKind c);

struct GenSpec {
  Model model = Model::linear;
  DesignKind design = DesignKind::ar1;
  CoefKind coef = CoefKind::unit_floor;
  Index n = 0;
  Index p = 0;
  Index k = 0;                 // true support size
  double rho = 0.0;            // design correlation
  double signal_ratio = 1.0;   // R: values drawn from U(m1, R*m1)
  double noise_sd = 1.0;       // linear noise standard deviation
  double train_fraction = 0.8; // logistic train/test split
  bool unit_intercept = true;  // linear: add the all-ones intercept
  std::uint64_t seed = 0;

  // Coefficient floor m1: 1 for unit_floor, 5*sqrt(2 ln p / n) for logfloor.
  double coef_floor() const;
  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd design;               // sqrt(n)-normalized columns
  Eigen::VectorXd response;
  SparseCoef true_coef;                 // defined against the normalized design
  std::vector<Index> true_support;
  std::vector<Index> train_rows;        // logistic only; empty for linear
  std::vector<Index> test_rows;
};

// Rows are independent AR(1) Gaussian vectors with corr(x_j, x_k) = rho^|j-k|
// (generated by the scalar recursion, which matches the Cholesky factor of
// the AR(1) covariance exactly); columns then normalized to sqrt(n).
Eigen::MatrixXd gen_ar1_design(Index n, Index p, double rho, std::uint64_t seed);

// Moving-average neighborhood design: start from iid normal columns
// normalized to sqrt(n), add rho times the two neighboring columns to each
// interior column, renormalize. Requires p >= 3.
Eigen::MatrixXd gen_neighbor_design(Index n, Index p, double rho, std::uint64_t seed);

// K-sparse coefficients on a uniform random support; values U(m1, R*m1) with
// the first sampled coordinate pinned exactly to m1.
SparseCoef gen_coef(Index p, Index k, double m1, double r, std::uint64_t seed);

// Linear: y = X beta + intercept + noise_sd * N(0, I).
Eigen::VectorXd gen_linear_response(const Eigen::MatrixXd& design, const SparseCoef& coef,
                                    double noise_sd, bool unit_intercept, std::uint64_t seed);

// Logistic: y_i ~ Bernoulli(sigmoid(x_i' beta)).
Eigen::VectorXd gen_logistic_response(const Eigen::MatrixXd& design, const SparseCoef& coef,
                                      std::uint64_t seed);

// Shuffled train/test split of 0..n-1; train gets round(fraction * n) rows.
// Both halves are returned sorted ascending.
std::pair<std::vector<Index>, std::vector<Index>> split_rows(Index n, double fraction,
                                                             std::uint64_t seed);

Dataset make_dataset(const GenSpec& spec);

// Loss over all rows (linear) or the training rows (logistic).
std::unique_ptr<Loss> make_train_loss(const Dataset& data, const GenSpec& spec,
                                      SubsolverOptions options = {});

}  // namespace sdarl
