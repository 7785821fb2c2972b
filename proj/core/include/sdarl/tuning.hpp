#pragma once

#include <cstdint>
#include <vector>

#include "sdarl/loss.hpp"
#include "sdarl/solver.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

enum class Criterion { hbic, cv };

struct TuningConfig {
  Index alpha = 1;            // sparsity-level stride
  Index q = 0;                // sweep bound; 0 means floor(n / ln n)
  Criterion criterion = Criterion::hbic;
  int cv_folds = 10;
  std::uint64_t cv_seed = 0;
  SolverConfig solver;        // target_size is overwritten per sweep entry

  void validate(Index n, Index p) const;
};

struct PathEntry {
  Index target_size = 0;      // T for this entry (0 marks the zero-model head)
  FitResult fit;
  double criterion_value = 0.0;
};

struct SolutionPath {
  std::vector<PathEntry> entries;  // entries[0] is the zero model
  std::size_t selected = 0;        // argmin of criterion_value over entries
  Index sweep_bound = 0;           // the Q actually used
};

// High-dimensional BIC surrogate. Linear: n*ln(2F) + df*ln(ln n)*ln(p);
// logistic: 2nF + df*ln(ln n)*ln(p). df counts |beta_i| > 1e-10. A perfect
// linear fit (F = 0) scores -infinity.
double hbic_score(const Loss& loss, const FitResult& fit, Index n, Index p);

// Mean held-out score over seeded shuffled folds: mean squared residual for
// linear, mean held-out deviance-style loss for logistic. Logistic folds
// whose training half loses a class are skipped with a note to stderr;
// throws std::runtime_error when every fold is skipped. t = 0 scores the
// zero model without fitting.
double cv_score(const Loss& loss, Index t, int folds, std::uint64_t seed,
                const SolverConfig& base);

// Adaptive sweep: run the line-search solver at T = alpha*k for k = 1, 2, ...
// warm-starting each entry from the previous coefficients, stopping after the
// first entry with T > Q; score every entry (including the zero-model head)
// and mark the minimizer.
SolutionPath fit_asdarl(const Loss& loss, const TuningConfig& config);

}  // namespace sdarl
