#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "sdarl/loss.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

// Hard-threshold operator with level sqrt(2 * lambda_tau): entries with
// magnitude strictly below the level are zeroed; boundary entries are kept.
Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& u, double lambda_tau);

struct SolverConfig {
  Index target_size = 1;            // T, the active-set cardinality
  double backtrack_factor = 0.9;    // nu in (0, 1)
  double sufficient_decrease = 0.1; // sigma in (0, 1/2)
  int max_outer = 50;
  int max_exponent = 200;           // cap on the line-search exponent m
  SubsolverOptions subsolver;
  std::vector<Index> eligible;      // restrict selection to these columns; empty = all

  void validate(Index p) const;  // throws std::invalid_argument on bad fields
};

// Active set A = indices of the T largest |beta_i + tau * d_i| (ties to the
// lower index), plus its complement and the selection threshold. When
// `eligible` is non-empty, selection runs over those columns only and the
// complement is taken within them.
struct ActiveSets {
  std::vector<Index> active;    // ascending
  std::vector<Index> inactive;  // ascending
  double threshold = 0.0;
};

ActiveSets detect_active(const SparseCoef& beta, const Eigen::VectorXd& d, double tau, Index t,
                         std::span<const Index> eligible = {});

// One data-driven backtracking search (exponents m = 0, 1, ...). The trial
// point at exponent m keeps beta's values on A(m) ∩ a_prev and takes
// tau * d on A(m) \ a_prev, where A(m) tracks beta + nu^m d. Acceptance:
// F(trial) - F(beta) <= -sigma * tau * sum_{i in A(m) \ a_prev} d_i^2.
struct LineSearchResult {
  double tau = 1.0;
  int exponent = 0;
  bool found = false;          // false when the exponent cap was hit
  std::vector<Index> active;   // A at the final tau
  double threshold = 0.0;      // selection threshold at the final tau
  SparseCoef trial;            // the accepted trial point
};

LineSearchResult line_search(const Loss& loss, const SparseCoef& beta,
                             const Eigen::VectorXd& d, std::span<const Index> a_prev,
                             const SolverConfig& config);

enum class Termination {
  converged,        // consecutive active sets equal
  cycle_detected,   // active set revisited an earlier iteration
  max_outer,        // outer-iteration budget exhausted
  line_search_cap,  // line search hit the exponent cap
};

const char* to_string(Termination t);

struct FitResult {
  SparseCoef beta;                 // final coefficients
  std::vector<Index> active_set;   // support basis of beta
  Eigen::VectorXd dual;            // -grad F(beta), zeroed on the active set
  std::vector<double> loss_trajectory;        // F at beta^0, beta^1, ...
  std::vector<double> step_sizes;             // accepted tau per iteration
  std::vector<int> search_exponents;          // accepted m per iteration
  std::vector<std::vector<Index>> active_set_history;  // A^0, A^1, ...
  int iterations = 0;
  Termination termination = Termination::max_outer;
  bool separation_flagged = false;
  double final_threshold = 0.0;    // selection threshold at the final step
  double final_tau = 1.0;
};

// Support detection and root finding with the data-driven line search.
FitResult fit_sdarl(const Loss& loss, const SolverConfig& config,
                    const SparseCoef* beta0 = nullptr);

// Fixed-step baseline: identical outer loop with tau fixed to 1.
FitResult fit_fixed_step(const Loss& loss, const SolverConfig& config,
                         const SparseCoef* beta0 = nullptr);

// sup-norm violation of the KKT fixed-point equations at (beta, tau, lambda):
// ||beta - H_{lambda tau}(beta + tau * d)||_inf with d = -grad F(beta).
double kkt_residual(const Loss& loss, const SparseCoef& beta, double tau, double lambda);

}  // namespace sdarl
