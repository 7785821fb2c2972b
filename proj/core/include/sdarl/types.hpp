#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdarl {

using Index = Eigen::Index;

// Sparse coefficient vector: total dimension plus (sorted index, value) pairs.
// Indices are strictly increasing; values may be zero (e.g. an active set whose
// restricted minimizer has an exactly-zero coordinate keeps that coordinate).
struct SparseCoef {
  Index dim = 0;
  std::vector<Index> indices;
  std::vector<double> values;

  SparseCoef() = default;
  SparseCoef(Index dimension, std::vector<Index> idx, std::vector<double> val)
      : dim(dimension), indices(std::move(idx)), values(std::move(val)) {
    if (indices.size() != values.size())
      throw std::invalid_argument("SparseCoef: index/value size mismatch");
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] < 0 || indices[i] >= dim)
        throw std::invalid_argument("SparseCoef: index out of range");
      if (i > 0 && indices[i] <= indices[i - 1])
        throw std::invalid_argument("SparseCoef: indices not strictly increasing");
    }
  }

  static SparseCoef zeros(Index dimension) {
    SparseCoef c;
    c.dim = dimension;
    return c;
  }

  static SparseCoef from_dense(const Eigen::VectorXd& v) {
    SparseCoef c;
    c.dim = v.size();
    for (Index i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) {
        c.indices.push_back(i);
        c.values.push_back(v[i]);
      }
    }
    return c;
  }

  Eigen::VectorXd to_dense() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < indices.size(); ++i) v[indices[i]] = values[i];
    return v;
  }

  Index entry_count() const { return static_cast<Index>(indices.size()); }

  // Number of entries with |value| above tol.
  Index count_nonzero(double tol = 0.0) const {
    Index c = 0;
    for (double v : values)
      if (std::abs(v) > tol) ++c;
    return c;
  }

  // Value at coordinate i (zero when off-support). Binary search.
  double at(Index i) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    if (it == indices.end() || *it != i) return 0.0;
    return values[static_cast<std::size_t>(it - indices.begin())];
  }

  bool operator==(const SparseCoef&) const = default;
};

}  // namespace sdarl
