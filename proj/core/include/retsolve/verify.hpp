// Self-verification suite: every closed form is re-derived by an
// independent route (quadrature, finite differences, Monte Carlo) and the
// two answers are compared at pinned tolerances.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retsolve/free_boundary.hpp"

namespace retsolve {

struct CheckResult {
  std::string name;
  std::string status;  // "pass", "fail" or "skip"
  double error = 0;     // worst observed error
  double tolerance = 0;
  std::string detail;
};

struct VerifyOptions {
  long mc_paths = 20000;
  std::uint64_t seed = 24061801;
  bool run_monte_carlo = true;
  int workers = 0;
};

// Runs the full battery against a solved model. Checks that do not apply
// to the model's regime report "skip".
std::vector<CheckResult> run_verification(const SolvedModel& m,
                                          const VerifyOptions& opt = {});

// Variant that lets tests inject a (possibly perturbed) dual value while
// keeping the rest of the solution, to confirm the battery catches wrong
// solutions.
std::vector<CheckResult> run_verification_with_dual(
    const SolvedModel& m, const PostRetirementDual& dual,
    const VerifyOptions& opt);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace retsolve
