#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdarl/datagen.hpp"
#include "sdarl/metrics.hpp"
#include "sdarl/solver.hpp"
#include "sdarl/tuning.hpp"

namespace sdarl {

enum class Method { sdarl, fixed_step, asdarl };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

// One experiment cell: a generation protocol plus the methods to run on it.
struct ExperimentSpec {
  GenSpec gen;
  std::vector<Method> methods{Method::sdarl};
  int replications = 100;
  std::uint64_t base_seed = 1;
  Index target_size = 0;  // T; 0 means T = gen.k
  SolverConfig solver;    // target_size filled per run
  TuningConfig tuning;    // used by the asdarl method

  Index effective_target() const { return target_size > 0 ? target_size : gen.k; }
  void validate() const;
};

// One row of the results CSV. `failed` rows keep their identity columns and
// carry NaN metrics.
struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  int rep = 0;
  Index n = 0;
  Index p = 0;
  Index k = 0;
  Index t = 0;
  double rho = 0.0;
  double r = 1.0;
  EvalRecord eval;
  bool failed = false;
};

}  // namespace sdarl
