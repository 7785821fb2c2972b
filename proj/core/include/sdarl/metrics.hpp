#pragma once

#include <optional>
#include <span>

#include "sdarl/loss.hpp"
#include "sdarl/types.hpp"

namespace sdarl {

// ||est - truth||_2 / ||truth||_2; requires a nonzero truth.
double relative_error(const SparseCoef& est, const SparseCoef& truth);

struct DiscoveryRates {
  double pdr = 0.0;  // |est ∩ truth| / |truth|
  double fdr = 0.0;  // |est \ truth| / |est|, 0 for an empty est
  double cdr = 0.0;  // pdr + (1 - fdr)
};

// Both index sets must be sorted ascending; truth must be non-empty.
DiscoveryRates discovery_rates(std::span<const Index> est, std::span<const Index> truth);

// Fraction of rows whose predicted class (probability >= 0.5 maps to 1)
// matches the response, over the given rows of the loss sample.
double classification_accuracy(const LogisticLoss& loss, const SparseCoef& beta,
                               std::span<const Index> rows);

// Per-replication evaluation payload.
struct EvalRecord {
  double relative_error = 0.0;
  double pdr = 0.0;
  double fdr = 0.0;
  double cdr = 0.0;
  std::optional<double> car;  // classification accuracy, logistic only
  int iterations = 0;
  double wall_time_s = 0.0;
  Index est_support_size = 0;
  Index true_support_size = 0;
};

}  // namespace sdarl
