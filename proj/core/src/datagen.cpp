#include "sdarl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdarl/linalg.hpp"
#include "sdarl/rng.hpp"

namespace sdarl {

const char* to_string(Model m) { return m == Model::linear ? "linear" : "logistic"; }
const char* to_string(DesignKind d) { return d == DesignKind::ar1 ? "ar1" : "neighbor"; }
const char* to_string(CoefKind c) { return c == CoefKind::unit_floor ? "unit_floor" : "logfloor"; }

double GenSpec::coef_floor() const {
  if (coef == CoefKind::unit_floor) return 1.0;
  return 5.0 * std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

void GenSpec::validate() const {
  if (n < 2 || p < 1) throw std::invalid_argument("GenSpec: need n >= 2 and p >= 1");
  if (k < 1 || k > p) throw std::invalid_argument("GenSpec: k must lie in [1, p]");
  if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("GenSpec: rho must lie in [0, 1)");
  if (signal_ratio < 1.0) throw std::invalid_argument("GenSpec: signal_ratio must be >= 1");
  if (noise_sd < 0.0) throw std::invalid_argument("GenSpec: noise_sd must be non-negative");
  if (model == Model::logistic && (train_fraction <= 0.0 || train_fraction >= 1.0))
    throw std::invalid_argument("GenSpec: train_fraction must lie in (0, 1)");
  if (design == DesignKind::neighbor && p < 3)
    throw std::invalid_argument("GenSpec: neighbor design needs p >= 3");
}

Eigen::MatrixXd gen_ar1_design(Index n, Index p, double rho, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_ar1_design: empty shape");
  if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("gen_ar1_design: bad rho");
  rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::design));
  Eigen::MatrixXd x(n, p);
  const double carry = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    double z = stream.next_normal();
    x(i, 0) = z;
    for (Index j = 1; j < p; ++j) {
      z = rho * z + carry * stream.next_normal();
      x(i, j) = z;
    }
  }
  return normalize_columns(x).matrix;
}

Eigen::MatrixXd gen_neighbor_design(Index n, Index p, double rho, std::uint64_t seed) {
  if (n < 1 || p < 3) throw std::invalid_argument("gen_neighbor_design: need p >= 3");
  if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("gen_neighbor_design: bad rho");
  rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::design));
  Eigen::MatrixXd base(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) base(i, j) = stream.next_normal();
  base = normalize_columns(base).matrix;
  Eigen::MatrixXd x = base;
  for (Index j = 1; j + 1 < p; ++j) x.col(j) += rho * (base.col(j + 1) + base.col(j - 1));
  return normalize_columns(x).matrix;
}

SparseCoef gen_coef(Index p, Index k, double m1, double r, std::uint64_t seed) {
  if (k < 1 || k > p) throw std::invalid_argument("gen_coef: k must lie in [1, p]");
  if (m1 <= 0.0 || r < 1.0) throw std::invalid_argument("gen_coef: need m1 > 0 and r >= 1");
  rng::Stream support_stream(rng::stream_key(seed, 0, rng::Purpose::coef_support));
  std::vector<Index> support = support_stream.sample_without_replacement(p, k);

  rng::Stream value_stream(rng::stream_key(seed, 0, rng::Purpose::coef_values));
  std::vector<std::pair<Index, double>> entries(static_cast<std::size_t>(k));
  // The first sampled coordinate carries the floor value exactly.
  entries[0] = {support[0], m1};
  for (std::size_t i = 1; i < support.size(); ++i)
    entries[i] = {support[i], value_stream.next_uniform(m1, r * m1)};
  std::sort(entries.begin(), entries.end());

  SparseCoef coef;
  coef.dim = p;
  for (auto& [idx, val] : entries) {
    coef.indices.push_back(idx);
    coef.values.push_back(val);
  }
  return coef;
}

Eigen::VectorXd gen_linear_response(const Eigen::MatrixXd& design, const SparseCoef& coef,
                                    double noise_sd, bool unit_intercept, std::uint64_t seed) {
  if (coef.dim != design.cols())
    throw std::invalid_argument("gen_linear_response: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(design.rows());
  for (std::size_t i = 0; i < coef.indices.size(); ++i)
    y += coef.values[i] * design.col(coef.indices[i]);
  if (unit_intercept) y.array() += 1.0;
  if (noise_sd > 0.0) {
    rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::noise));
    y += noise_sd * stream.normal_vector(design.rows());
  }
  return y;
}

Eigen::VectorXd gen_logistic_response(const Eigen::MatrixXd& design, const SparseCoef& coef,
                                      std::uint64_t seed) {
  if (coef.dim != design.cols())
    throw std::invalid_argument("gen_logistic_response: dimension mismatch");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(design.rows());
  for (std::size_t i = 0; i < coef.indices.size(); ++i)
    z += coef.values[i] * design.col(coef.indices[i]);
  rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::response));
  Eigen::VectorXd y(design.rows());
  for (Index i = 0; i < y.size(); ++i) y[i] = stream.next_uniform() < sigmoid(z[i]) ? 1.0 : 0.0;
  return y;
}

std::pair<std::vector<Index>, std::vector<Index>> split_rows(Index n, double fraction,
                                                             std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) throw std::invalid_argument("split_rows: bad fraction");
  rng::Stream stream(rng::stream_key(seed, 0, rng::Purpose::split));
  std::vector<Index> perm = stream.permutation(n);
  Index n_train = static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n - 1);
  std::vector<Index> train(perm.begin(), perm.begin() + n_train);
  std::vector<Index> test(perm.begin() + n_train, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

Dataset make_dataset(const GenSpec& spec) {
  spec.validate();
  Dataset data;
  data.design = spec.design == DesignKind::ar1
                    ? gen_ar1_design(spec.n, spec.p, spec.rho, spec.seed)
                    : gen_neighbor_design(spec.n, spec.p, spec.rho, spec.seed);
  data.true_coef =
      gen_coef(spec.p, spec.k, spec.coef_floor(), spec.signal_ratio, spec.seed);
  data.true_support = data.true_coef.indices;
  if (spec.model == Model::linear) {
    data.response = gen_linear_response(data.design, data.true_coef, spec.noise_sd,
                                        spec.unit_intercept, spec.seed);
  } else {
    data.response = gen_logistic_response(data.design, data.true_coef, spec.seed);
    auto [train, test] = split_rows(spec.n, spec.train_fraction, spec.seed);
    data.train_rows = std::move(train);
    data.test_rows = std::move(test);
  }
  return data;
}

std::unique_ptr<Loss> make_train_loss(const Dataset& data, const GenSpec& spec,
                                      SubsolverOptions options) {
  if (spec.model == Model::linear)
    return std::make_unique<LinearLoss>(data.design, data.response, spec.unit_intercept,
                                        options);
  return std::make_unique<LogisticLoss>(data.design(data.train_rows, Eigen::all),
                                        data.response(data.train_rows), options);
}

}  // namespace sdarl
