#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>

#include "sdarl/types.hpp"

namespace sdarl {

// Output of a restricted minimization over a fixed active set.
struct RestrictedFit {
  SparseCoef beta;             // supported on the active set
  int iterations = 0;          // subsolver iterations used
  bool separated = false;      // logistic: coefficients escaped (|beta_i| > 30)
  double grad_inf_norm = 0.0;  // restricted gradient at exit
};

// Subsolver knobs shared by every loss.
struct SubsolverOptions {
  double grad_tol = 1e-8;
  int max_iterations = 100;
};

// Smooth empirical loss F(beta) with exact gradients and a restricted
// minimizer. Implementations own the data; rows index samples, columns index
// features. Active sets passed to minimize_restricted must be sorted
// ascending and within range.
class Loss {
 public:
  virtual ~Loss() = default;

  virtual Index dim() const = 0;
  virtual Index sample_count() const = 0;
  virtual bool is_classification() const = 0;
  virtual const Eigen::VectorXd& response() const = 0;

  virtual double value(const SparseCoef& beta) const = 0;
  virtual Eigen::VectorXd gradient(const SparseCoef& beta) const = 0;

  // argmin of F over vectors supported on `active`; on ties the subproblem
  // solver returns the minimum-norm solution. warm_start, when given, is
  // projected onto `active`.
  virtual RestrictedFit minimize_restricted(std::span<const Index> active,
                                            const SparseCoef* warm_start = nullptr) const = 0;

  // Same loss restricted to a subset of samples (rows sorted ascending).
  virtual std::unique_ptr<Loss> subset_rows(std::span<const Index> rows) const = 0;
};

// F(beta) = ||X beta + b0 - y||^2 / (2n) with b0 the all-ones intercept when
// unit_intercept is set (the default), zero otherwise.
class LinearLoss final : public Loss {
 public:
  LinearLoss(Eigen::MatrixXd design, Eigen::VectorXd response, bool unit_intercept = true,
             SubsolverOptions options = {});

  Index dim() const override { return x_.cols(); }
  Index sample_count() const override { return x_.rows(); }
  bool is_classification() const override { return false; }
  const Eigen::VectorXd& response() const override { return y_; }
  bool unit_intercept() const { return unit_intercept_; }
  const Eigen::MatrixXd& design() const { return x_; }

  double value(const SparseCoef& beta) const override;
  Eigen::VectorXd gradient(const SparseCoef& beta) const override;
  RestrictedFit minimize_restricted(std::span<const Index> active,
                                    const SparseCoef* warm_start = nullptr) const override;
  std::unique_ptr<Loss> subset_rows(std::span<const Index> rows) const override;

 private:
  Eigen::VectorXd residual(const SparseCoef& beta) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  bool unit_intercept_;
  Eigen::VectorXd target_;  // y minus the fixed intercept
  SubsolverOptions options_;
};

// F(beta) = (1/n) sum_i [softplus(x_i' beta) - y_i x_i' beta], y in {0,1}.
// No intercept term. Restricted minimization is damped Newton with halving
// line search; coefficients escaping past |beta_i| > 30 at exit flag the
// active set as separated.
class LogisticLoss final : public Loss {
 public:
  LogisticLoss(Eigen::MatrixXd design, Eigen::VectorXd response, SubsolverOptions options = {});

  Index dim() const override { return x_.cols(); }
  Index sample_count() const override { return x_.rows(); }
  bool is_classification() const override { return true; }
  const Eigen::VectorXd& response() const override { return y_; }
  const Eigen::MatrixXd& design() const { return x_; }

  double value(const SparseCoef& beta) const override;
  Eigen::VectorXd gradient(const SparseCoef& beta) const override;
  RestrictedFit minimize_restricted(std::span<const Index> active,
                                    const SparseCoef* warm_start = nullptr) const override;
  std::unique_ptr<Loss> subset_rows(std::span<const Index> rows) const override;

  // P(y = 1 | x) for each row under beta.
  Eigen::VectorXd predict_proba(const SparseCoef& beta) const;

 private:
  double value_from_margins(const Eigen::VectorXd& z) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  SubsolverOptions options_;
};

// Numerically stable log(1 + exp(z)).
double softplus(double z);

// Numerically stable logistic sigmoid.
double sigmoid(double z);

}  // namespace sdarl
