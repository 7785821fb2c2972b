#include "sdarl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdarl/linalg.hpp"

namespace sdarl {

namespace {

void check_active(std::span<const Index> active, Index p) {
  if (active.empty()) throw std::invalid_argument("minimize_restricted: empty active set");
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i] < 0 || active[i] >= p)
      throw std::invalid_argument("minimize_restricted: active index out of range");
    if (i > 0 && active[i] <= active[i - 1])
      throw std::invalid_argument("minimize_restricted: active set must be sorted ascending");
  }
}

std::vector<Index> to_vector(std::span<const Index> s) {
  return {s.begin(), s.end()};
}

// Warm-start values projected onto the active set.
Eigen::VectorXd project_warm(std::span<const Index> active, const SparseCoef* warm) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Index>(active.size()));
  if (warm == nullptr) return v;
  for (std::size_t i = 0; i < active.size(); ++i) v[static_cast<Index>(i)] = warm->at(active[i]);
  return v;
}

constexpr double kSeparationBound = 30.0;

}  // namespace

double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

LinearLoss::LinearLoss(Eigen::MatrixXd design, Eigen::VectorXd response, bool unit_intercept,
                       SubsolverOptions options)
    : x_(std::move(design)),
      y_(std::move(response)),
      unit_intercept_(unit_intercept),
      options_(options) {
  if (x_.rows() != y_.size()) throw std::invalid_argument("LinearLoss: row/response mismatch");
  if (x_.rows() == 0) throw std::invalid_argument("LinearLoss: empty sample");
  target_ = unit_intercept_ ? Eigen::VectorXd(y_.array() - 1.0) : y_;
}

Eigen::VectorXd LinearLoss::residual(const SparseCoef& beta) const {
  Eigen::VectorXd r = -target_;
  for (std::size_t i = 0; i < beta.indices.size(); ++i)
    r += beta.values[i] * x_.col(beta.indices[i]);
  return r;
}

double LinearLoss::value(const SparseCoef& beta) const {
  if (beta.dim != dim()) throw std::invalid_argument("LinearLoss::value: dimension mismatch");
  return residual(beta).squaredNorm() / (2.0 * static_cast<double>(x_.rows()));
}

Eigen::VectorXd LinearLoss::gradient(const SparseCoef& beta) const {
  if (beta.dim != dim()) throw std::invalid_argument("LinearLoss::gradient: dimension mismatch");
  return x_.transpose() * residual(beta) / static_cast<double>(x_.rows());
}

RestrictedFit LinearLoss::minimize_restricted(std::span<const Index> active,
                                              const SparseCoef* /*warm_start*/) const {
  check_active(active, dim());
  std::vector<Index> a = to_vector(active);
  Eigen::MatrixXd xa = x_(Eigen::all, a);
  Eigen::MatrixXd gram = xa.transpose() * xa;
  Eigen::VectorXd rhs = xa.transpose() * target_;
  Eigen::VectorXd v = solve_spd_min_norm(gram, rhs);

  RestrictedFit fit;
  fit.beta = SparseCoef(dim(), std::move(a), {v.data(), v.data() + v.size()});
  fit.iterations = 1;
  Eigen::VectorXd g = xa.transpose() * (xa * v - target_) / static_cast<double>(x_.rows());
  fit.grad_inf_norm = g.size() > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
  return fit;
}

std::unique_ptr<Loss> LinearLoss::subset_rows(std::span<const Index> rows) const {
  std::vector<Index> r = to_vector(rows);
  return std::make_unique<LinearLoss>(x_(r, Eigen::all), y_(r), unit_intercept_, options_);
}

LogisticLoss::LogisticLoss(Eigen::MatrixXd design, Eigen::VectorXd response,
                           SubsolverOptions options)
    : x_(std::move(design)), y_(std::move(response)), options_(options) {
  if (x_.rows() != y_.size()) throw std::invalid_argument("LogisticLoss: row/response mismatch");
  if (x_.rows() == 0) throw std::invalid_argument("LogisticLoss: empty sample");
  for (Index i = 0; i < y_.size(); ++i)
    if (y_[i] != 0.0 && y_[i] != 1.0)
      throw std::invalid_argument("LogisticLoss: responses must be 0 or 1");
}

double LogisticLoss::value_from_margins(const Eigen::VectorXd& z) const {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += softplus(z[i]) - y_[i] * z[i];
  return s / static_cast<double>(z.size());
}

double LogisticLoss::value(const SparseCoef& beta) const {
  if (beta.dim != dim()) throw std::invalid_argument("LogisticLoss::value: dimension mismatch");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x_.rows());
  for (std::size_t i = 0; i < beta.indices.size(); ++i)
    z += beta.values[i] * x_.col(beta.indices[i]);
  return value_from_margins(z);
}

Eigen::VectorXd LogisticLoss::gradient(const SparseCoef& beta) const {
  if (beta.dim != dim())
    throw std::invalid_argument("LogisticLoss::gradient: dimension mismatch");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x_.rows());
  for (std::size_t i = 0; i < beta.indices.size(); ++i)
    z += beta.values[i] * x_.col(beta.indices[i]);
  Eigen::VectorXd pi(z.size());
  for (Index i = 0; i < z.size(); ++i) pi[i] = sigmoid(z[i]);
  return x_.transpose() * (pi - y_) / static_cast<double>(x_.rows());
}

Eigen::VectorXd LogisticLoss::predict_proba(const SparseCoef& beta) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x_.rows());
  for (std::size_t i = 0; i < beta.indices.size(); ++i)
    z += beta.values[i] * x_.col(beta.indices[i]);
  Eigen::VectorXd pi(z.size());
  for (Index i = 0; i < z.size(); ++i) pi[i] = sigmoid(z[i]);
  return pi;
}

RestrictedFit LogisticLoss::minimize_restricted(std::span<const Index> active,
                                                const SparseCoef* warm_start) const {
  check_active(active, dim());
  const double n = static_cast<double>(x_.rows());
  std::vector<Index> a = to_vector(active);
  Eigen::MatrixXd xa = x_(Eigen::all, a);

  Eigen::VectorXd v = project_warm(active, warm_start);
  Eigen::VectorXd z = xa * v;
  double f = value_from_margins(z);

  RestrictedFit fit;
  int iter = 0;
  double gnorm = 0.0;
  for (; iter < options_.max_iterations; ++iter) {
    Eigen::VectorXd pi(z.size());
    for (Index i = 0; i < z.size(); ++i) pi[i] = sigmoid(z[i]);
    Eigen::VectorXd g = xa.transpose() * (pi - y_) / n;
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= options_.grad_tol) break;

    Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
    Eigen::MatrixXd h = xa.transpose() * w.asDiagonal() * xa / n;
    Eigen::VectorXd step = solve_spd_min_norm(h, -g);
    if (!step.allFinite() || g.dot(step) >= 0.0) {
      // Degenerate curvature (saturated probabilities): ridge jitter, then
      // plain gradient descent as the last resort.
      h.diagonal().array() += 1e-10;
      step = solve_spd_min_norm(h, -g);
      if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;
    }

    Eigen::VectorXd dz = xa * step;
    double scale = 1.0;
    bool decreased = false;
    for (int halving = 0; halving < 60; ++halving) {
      double f_try = value_from_margins(z + scale * dz);
      if (f_try < f) {
        v += scale * step;
        z += scale * dz;
        f = f_try;
        decreased = true;
        break;
      }
      scale *= 0.5;
    }
    if (!decreased) break;  // stagnated at numerical precision
  }

  fit.beta = SparseCoef(dim(), std::move(a), {v.data(), v.data() + v.size()});
  fit.iterations = iter;
  fit.grad_inf_norm = gnorm;
  fit.separated = v.size() > 0 && v.lpNorm<Eigen::Infinity>() > kSeparationBound;
  return fit;
}

std::unique_ptr<Loss> LogisticLoss::subset_rows(std::span<const Index> rows) const {
  std::vector<Index> r = to_vector(rows);
  return std::make_unique<LogisticLoss>(x_(r, Eigen::all), y_(r), options_);
}

}  // namespace sdarl
