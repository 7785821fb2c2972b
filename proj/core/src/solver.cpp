#include "sdarl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdarl/linalg.hpp"
#include "sdarl/rng.hpp"

namespace sdarl {

namespace {

std::uint64_t hash_index_set(std::span<const Index> s) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (Index i : s) h = rng::mix64(h + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1));
  return h;
}

bool contains(std::span<const Index> sorted, Index i) {
  return std::binary_search(sorted.begin(), sorted.end(), i);
}

// Trial point (beta + tau * d) restricted to `active`; beta is supported on
// a_prev and d vanishes there, so the restriction keeps beta's values on
// active ∩ a_prev and takes tau * d elsewhere.
SparseCoef make_trial(const SparseCoef& beta, const Eigen::VectorXd& d, double tau,
                      std::span<const Index> active, std::span<const Index> a_prev) {
  SparseCoef trial;
  trial.dim = beta.dim;
  trial.indices.reserve(active.size());
  trial.values.reserve(active.size());
  for (Index i : active) {
    trial.indices.push_back(i);
    trial.values.push_back(contains(a_prev, i) ? beta.at(i) : tau * d[i]);
  }
  return trial;
}

}  // namespace

Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& u, double lambda_tau) {
  if (lambda_tau < 0.0) throw std::invalid_argument("hard_threshold: negative level");
  const double level = std::sqrt(2.0 * lambda_tau);
  Eigen::VectorXd out = u;
  for (Index i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) < level) out[i] = 0.0;
  return out;
}

void SolverConfig::validate(Index p) const {
  if (p < 1) throw std::invalid_argument("SolverConfig: empty problem");
  Index limit = eligible.empty() ? p : static_cast<Index>(eligible.size());
  if (target_size < 1 || target_size > limit)
    throw std::invalid_argument("SolverConfig: target_size must lie in [1, eligible columns]");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw std::invalid_argument("SolverConfig: backtrack_factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5))
    throw std::invalid_argument("SolverConfig: sufficient_decrease must lie in (0, 1/2)");
  if (max_outer < 1) throw std::invalid_argument("SolverConfig: max_outer must be positive");
  if (max_exponent < 1) throw std::invalid_argument("SolverConfig: max_exponent must be positive");
  if (subsolver.grad_tol <= 0.0 || subsolver.max_iterations < 1)
    throw std::invalid_argument("SolverConfig: bad subsolver options");
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (eligible[i] < 0 || eligible[i] >= p)
      throw std::invalid_argument("SolverConfig: eligible column out of range");
    if (i > 0 && eligible[i] <= eligible[i - 1])
      throw std::invalid_argument("SolverConfig: eligible columns must be sorted ascending");
  }
}

ActiveSets detect_active(const SparseCoef& beta, const Eigen::VectorXd& d, double tau, Index t,
                         std::span<const Index> eligible) {
  if (beta.dim != d.size()) throw std::invalid_argument("detect_active: dimension mismatch");
  Eigen::VectorXd u = beta.to_dense() + tau * d;
  ActiveSets out;
  if (eligible.empty()) {
    TopTSelection sel = top_t_select(u, t);
    out.threshold = sel.threshold;
    out.active = std::move(sel.indices);
    out.inactive.reserve(static_cast<std::size_t>(u.size() - t));
    std::size_t pos = 0;
    for (Index i = 0; i < u.size(); ++i) {
      if (pos < out.active.size() && out.active[pos] == i)
        ++pos;
      else
        out.inactive.push_back(i);
    }
    return out;
  }

  // Selection restricted to eligible columns: compact, select, map back.
  Eigen::VectorXd sub(static_cast<Index>(eligible.size()));
  for (std::size_t i = 0; i < eligible.size(); ++i) sub[static_cast<Index>(i)] = u[eligible[i]];
  TopTSelection sel = top_t_select(sub, t);
  out.threshold = sel.threshold;
  out.active.reserve(sel.indices.size());
  for (Index i : sel.indices) out.active.push_back(eligible[static_cast<std::size_t>(i)]);
  std::size_t pos = 0;
  for (Index i : eligible) {
    if (pos < out.active.size() && out.active[pos] == i)
      ++pos;
    else
      out.inactive.push_back(i);
  }
  return out;
}

LineSearchResult line_search(const Loss& loss, const SparseCoef& beta,
                             const Eigen::VectorXd& d, std::span<const Index> a_prev,
                             const SolverConfig& config) {
  const double f_base = loss.value(beta);
  LineSearchResult res;
  double tau = 1.0;
  for (int m = 0; m < config.max_exponent; ++m, tau *= config.backtrack_factor) {
    ActiveSets sets = detect_active(beta, d, tau, config.target_size, config.eligible);
    SparseCoef trial = make_trial(beta, d, tau, sets.active, a_prev);
    double decrease_bound = 0.0;
    for (Index i : sets.active)
      if (!contains(a_prev, i)) decrease_bound += d[i] * d[i];
    decrease_bound *= config.sufficient_decrease * tau;
    double f_trial = loss.value(trial);
    res.tau = tau;
    res.exponent = m;
    res.active = std::move(sets.active);
    res.threshold = sets.threshold;
    res.trial = std::move(trial);
    if (f_trial - f_base <= -decrease_bound) {
      res.found = true;
      return res;
    }
  }
  res.found = false;
  return res;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::cycle_detected: return "cycle_detected";
    case Termination::max_outer: return "max_outer";
    case Termination::line_search_cap: return "line_search_cap";
  }
  return "unknown";
}

namespace {

FitResult run_solver(const Loss& loss, const SolverConfig& config, const SparseCoef* beta0,
                     bool with_line_search) {
  const Index p = loss.dim();
  config.validate(p);
  SparseCoef beta = beta0 != nullptr ? *beta0 : SparseCoef::zeros(p);
  if (beta.dim != p) throw std::invalid_argument("fit: initial point dimension mismatch");
  if (!config.eligible.empty())
    for (Index i : beta.indices)
      if (!contains(config.eligible, i))
        throw std::invalid_argument("fit: initial support outside eligible columns");

  FitResult res;
  res.loss_trajectory.push_back(loss.value(beta));
  Eigen::VectorXd d = -loss.gradient(beta);
  ActiveSets init = detect_active(beta, d, 1.0, config.target_size, config.eligible);
  std::vector<Index> a = std::move(init.active);
  res.final_threshold = init.threshold;
  res.active_set_history.push_back(a);
  std::vector<std::uint64_t> seen_hashes{hash_index_set(a)};

  SparseCoef warm_store = beta;
  const SparseCoef* warm = beta0 != nullptr ? &warm_store : nullptr;
  res.termination = Termination::max_outer;

  for (int k = 0; k < config.max_outer; ++k) {
    RestrictedFit rf = loss.minimize_restricted(a, warm);
    res.separation_flagged = res.separation_flagged || rf.separated;
    SparseCoef beta_next = std::move(rf.beta);
    res.loss_trajectory.push_back(loss.value(beta_next));
    Eigen::VectorXd g = loss.gradient(beta_next);
    d = -g;
    for (Index i : a) d[i] = 0.0;

    res.beta = beta_next;
    res.active_set = a;
    res.dual = d;
    res.iterations = k + 1;

    std::vector<Index> a_next;
    double tau = 1.0;
    double threshold = 0.0;
    int exponent = 0;
    if (with_line_search) {
      LineSearchResult ls = line_search(loss, beta_next, d, a, config);
      if (!ls.found) {
        res.termination = Termination::line_search_cap;
        return res;
      }
      tau = ls.tau;
      exponent = ls.exponent;
      threshold = ls.threshold;
      a_next = std::move(ls.active);
      warm_store = std::move(ls.trial);
      warm = &warm_store;
    } else {
      ActiveSets sets = detect_active(beta_next, d, 1.0, config.target_size, config.eligible);
      threshold = sets.threshold;
      a_next = std::move(sets.active);
      warm_store = beta_next;
      warm = &warm_store;
    }

    res.step_sizes.push_back(tau);
    res.search_exponents.push_back(exponent);
    res.active_set_history.push_back(a_next);
    res.final_threshold = threshold;
    res.final_tau = tau;

    if (a_next == a) {
      res.termination = Termination::converged;
      return res;
    }
    std::uint64_t h = hash_index_set(a_next);
    bool revisited = false;
    for (std::size_t i = 0; i < seen_hashes.size() && !revisited; ++i)
      if (seen_hashes[i] == h && res.active_set_history[i] == a_next) revisited = true;
    if (revisited) {
      res.termination = Termination::cycle_detected;
      return res;
    }
    seen_hashes.push_back(h);
    a = std::move(a_next);
  }
  return res;
}

}  // namespace

FitResult fit_sdarl(const Loss& loss, const SolverConfig& config, const SparseCoef* beta0) {
  return run_solver(loss, config, beta0, true);
}

FitResult fit_fixed_step(const Loss& loss, const SolverConfig& config, const SparseCoef* beta0) {
  return run_solver(loss, config, beta0, false);
}

double kkt_residual(const Loss& loss, const SparseCoef& beta, double tau, double lambda) {
  if (tau <= 0.0 || lambda < 0.0) throw std::invalid_argument("kkt_residual: bad tau or lambda");
  Eigen::VectorXd d = -loss.gradient(beta);
  Eigen::VectorXd u = beta.to_dense() + tau * d;
  Eigen::VectorXd h = hard_threshold(u, lambda * tau);
  return (beta.to_dense() - h).lpNorm<Eigen::Infinity>();
}

}  // namespace sdarl
