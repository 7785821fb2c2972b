#include "sdarl/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sdarl {

double relative_error(const SparseCoef& est, const SparseCoef& truth) {
  if (est.dim != truth.dim) throw std::invalid_argument("relative_error: dimension mismatch");
  double denom = truth.to_dense().norm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero truth vector");
  return (est.to_dense() - truth.to_dense()).norm() / denom;
}

DiscoveryRates discovery_rates(std::span<const Index> est, std::span<const Index> truth) {
  if (truth.empty()) throw std::invalid_argument("discovery_rates: empty truth support");
  auto check_sorted = [](std::span<const Index> s, const char* what) {
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] <= s[i - 1])
        throw std::invalid_argument(std::string("discovery_rates: ") + what +
                                    " not sorted ascending");
  };
  check_sorted(est, "estimate");
  check_sorted(truth, "truth");

  std::size_t hits = 0;
  std::size_t i = 0, j = 0;
  while (i < est.size() && j < truth.size()) {
    if (est[i] == truth[j]) {
      ++hits;
      ++i;
      ++j;
    } else if (est[i] < truth[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  DiscoveryRates r;
  r.pdr = static_cast<double>(hits) / static_cast<double>(truth.size());
  r.fdr = est.empty() ? 0.0
                      : static_cast<double>(est.size() - hits) / static_cast<double>(est.size());
  r.cdr = r.pdr + (1.0 - r.fdr);
  return r;
}

double classification_accuracy(const LogisticLoss& loss, const SparseCoef& beta,
                               std::span<const Index> rows) {
  if (rows.empty()) throw std::invalid_argument("classification_accuracy: empty row set");
  Eigen::VectorXd proba = loss.predict_proba(beta);
  const Eigen::VectorXd& y = loss.response();
  Index correct = 0;
  for (Index r : rows) {
    if (r < 0 || r >= proba.size())
      throw std::invalid_argument("classification_accuracy: row out of range");
    double predicted = proba[r] >= 0.5 ? 1.0 : 0.0;
    if (predicted == y[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace sdarl
