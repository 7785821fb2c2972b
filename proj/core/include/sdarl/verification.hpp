#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sdarl {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  // Test hook: biases every gradient evaluation used by the gradient checks
  // so the battery must fail and name them.
  bool corrupt_gradient = false;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool all_pass() const;
};

// Seeded small-instance battery: gradient checks against central
// differences, selection and threshold properties against sort oracles,
// descent and line-search invariants over a mixed matrix of fits,
// KKT certification of converged runs, brute-force cross-checks, and the
// accepted-step lower bound on small linear problems.
VerifyReport run_verification(const VerifyOptions& options = {});

std::string format_report(const VerifyReport& report);

}  // namespace sdarl
