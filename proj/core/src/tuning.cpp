#include "sdarl/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "sdarl/rng.hpp"

namespace sdarl {

void TuningConfig::validate(Index n, Index p) const {
  if (alpha < 1) throw std::invalid_argument("TuningConfig: alpha must be positive");
  if (q < 0) throw std::invalid_argument("TuningConfig: q must be non-negative");
  if (criterion == Criterion::cv && (cv_folds < 2 || cv_folds > n))
    throw std::invalid_argument("TuningConfig: cv_folds must lie in [2, n]");
  (void)p;
}

double hbic_score(const Loss& loss, const FitResult& fit, Index n, Index p) {
  double f = loss.value(fit.beta);
  double df = static_cast<double>(fit.beta.count_nonzero(1e-10));
  double penalty = df * std::log(std::log(static_cast<double>(n))) *
                   std::log(static_cast<double>(p));
  if (loss.is_classification()) return 2.0 * static_cast<double>(n) * f + penalty;
  if (f <= 0.0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(n) * std::log(2.0 * f) + penalty;
}

double cv_score(const Loss& loss, Index t, int folds, std::uint64_t seed,
                const SolverConfig& base) {
  const Index n = loss.sample_count();
  if (folds < 2 || folds > n) throw std::invalid_argument("cv_score: folds must lie in [2, n]");
  if (t < 0 || t > loss.dim()) throw std::invalid_argument("cv_score: bad target size");

  rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::cv_folds));
  std::vector<Index> perm = stream.permutation(n);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        static_cast<int>(i % folds);

  double total = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    if (test_rows.empty() || train_rows.empty()) continue;

    auto train = loss.subset_rows(train_rows);
    if (loss.is_classification()) {
      const Eigen::VectorXd& ty = train->response();
      double lo = ty.minCoeff(), hi = ty.maxCoeff();
      if (lo == hi) {
        std::cerr << "cv_score: fold " << f << " lost a class in training, skipped\n";
        continue;
      }
    }

    SparseCoef beta = SparseCoef::zeros(loss.dim());
    if (t > 0) {
      SolverConfig cfg = base;
      cfg.target_size = t;
      beta = fit_sdarl(*train, cfg).beta;
    }
    auto test = loss.subset_rows(test_rows);
    double held = test->value(beta);
    // Linear F is half the mean squared residual.
    total += loss.is_classification() ? held : 2.0 * held;
    ++used;
  }
  if (used == 0) throw std::runtime_error("cv_score: every fold was skipped");
  return total / static_cast<double>(used);
}

SolutionPath fit_asdarl(const Loss& loss, const TuningConfig& config) {
  const Index n = loss.sample_count();
  const Index p = loss.dim();
  config.validate(n, p);
  const Index limit = config.solver.eligible.empty()
                          ? p
                          : static_cast<Index>(config.solver.eligible.size());
  const Index q = config.q > 0
                      ? config.q
                      : static_cast<Index>(std::floor(static_cast<double>(n) /
                                                      std::log(static_cast<double>(n))));

  SolutionPath path;
  path.sweep_bound = q;

  PathEntry head;
  head.target_size = 0;
  head.fit.beta = SparseCoef::zeros(p);
  head.fit.termination = Termination::converged;
  head.fit.loss_trajectory.push_back(loss.value(head.fit.beta));
  path.entries.push_back(std::move(head));

  SparseCoef warm = SparseCoef::zeros(p);
  for (Index k = 1;; ++k) {
    Index t = config.alpha * k;
    if (t > limit) break;  // cannot select more columns than exist
    SolverConfig cfg = config.solver;
    cfg.target_size = t;
    PathEntry entry;
    entry.target_size = t;
    entry.fit = fit_sdarl(loss, cfg, &warm);
    warm = entry.fit.beta;
    path.entries.push_back(std::move(entry));
    if (t > q) break;  // the first entry past the bound is kept, then stop
  }

  for (PathEntry& entry : path.entries) {
    if (config.criterion == Criterion::hbic) {
      entry.criterion_value = hbic_score(loss, entry.fit, n, p);
    } else {
      entry.criterion_value =
          cv_score(loss, entry.target_size, config.cv_folds, config.cv_seed, config.solver);
    }
  }
  path.selected = 0;
  for (std::size_t i = 1; i < path.entries.size(); ++i)
    if (path.entries[i].criterion_value < path.entries[path.selected].criterion_value)
      path.selected = i;
  return path;
}

}  // namespace sdarl
