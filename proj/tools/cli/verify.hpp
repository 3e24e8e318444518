#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdeform/t_system.hpp"

namespace tdeform::cli {

struct VerifyOptions {
  TParams params;
  std::uint64_t seed = 20180417;
  /// Random points per pointwise check, and random specs per spec check.
  int samples = 100;
  /// Test hook: perturbs the Hamilton-Poisson part so the suite must fail.
  bool corrupt = false;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool skipped = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool all_passed() const;
};

/// Runs the conservation / cross-form / deformation identity suite at the
/// given parameters. Never throws for finite parameters with a != 0; a
/// numerical failure inside a check is recorded as a failed check.
VerifyReport run_identity_suite(const VerifyOptions& opt);

}  // namespace tdeform::cli
