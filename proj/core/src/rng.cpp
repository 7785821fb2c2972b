#include "sdarl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdarl::rng {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t base_seed, std::uint64_t replication, Purpose purpose) {
  std::uint64_t h = mix64(base_seed + kGamma * (replication + 1));
  return mix64(h + kGamma * (static_cast<std::uint64_t>(purpose) + 1));
}

std::uint64_t Stream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double Stream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_uniform();
}

double Stream::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  // 1 - u1 lies in (0, 1], so the log is finite.
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

std::uint64_t Stream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

std::vector<Eigen::Index> Stream::permutation(Eigen::Index n) {
  return sample_without_replacement(n, n);
}

std::vector<Eigen::Index> Stream::sample_without_replacement(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: bad k");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index j = i + static_cast<Eigen::Index>(
                             next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Eigen::VectorXd Stream::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = next_normal();
  return v;
}

}  // namespace sdarl::rng
