#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sdarl::rng {

// Purposes keep the streams consumed by one pipeline stage independent of the
// draw counts of every other stage, so e.g. adding noise draws never perturbs
// the design matrix of the same replication.
enum class Purpose : std::uint64_t {
  design = 1,
  coef_support = 2,
  coef_values = 3,
  noise = 4,
  response = 5,
  split = 6,
  cv_folds = 7,
  generic = 8,
};

// SplitMix64 output mixer.
std::uint64_t mix64(std::uint64_t z);

// Deterministic stream key for (base seed, replication, purpose).
std::uint64_t stream_key(std::uint64_t base_seed, std::uint64_t replication, Purpose purpose);

// Counter-based SplitMix64 stream. Identical key -> identical sequence on any
// platform; the generator state is a single 64-bit counter.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform();

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi);

  // Standard normal via Box-Muller (caches the second variate).
  double next_normal();

  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

  // Fisher-Yates shuffle of 0..n-1.
  std::vector<Eigen::Index> permutation(Eigen::Index n);

  // First k entries of a random permutation of 0..n-1 (sample without
  // replacement, order of sampling preserved).
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k);

  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sdarl::rng
