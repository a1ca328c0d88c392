#pragma once

// Named verification suites: each runs a family of library invariants on
// canned maps and reports per-property pass/fail with the worst measured
// margin against its bound.

#include <string>
#include <vector>

#include "kobdyn/map_spec.hpp"

namespace kobdyn {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst measured deviation (sign convention per check)
  double bound = 0.0;  // the tolerance it was held to
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass = false;  // conjunction of the checks
};

/// convexity, julia, fekete, steplimit, conjugation, semigroup-linearity,
/// lindelof.
const std::vector<std::string>& verify_suite_names();

/// Runs one named suite; unknown names throw Error.  cfg.samples scales the
/// sampled checks, cfg.seed makes them reproducible.
SuiteReport run_verify_suite(const std::string& name, const RunConfig& cfg);

// Canned half-space normal forms shared by the suites (also convenient in
// tests): the pure dilation (λ z1, √λ w) and the horizontal translation
// (z1 + b, w) with Im b ≥ 0.
SelfMap siegel_dilation_map(double lambda, int q);
SelfMap siegel_translation_map(Complex b, int q);

}  // namespace kobdyn
