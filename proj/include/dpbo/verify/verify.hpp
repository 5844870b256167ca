#ifndef DPBO_VERIFY_VERIFY_HPP
#define DPBO_VERIFY_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dpbo/core/types.hpp"

namespace dpbo::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240801;
  int gradcheck_points = 100;
  int lipschitz_pairs = 10000;
  int nonexpansive_tuples = 10000;
};

// Max relative error between each analytic gradient oracle and central
// finite differences of the full-batch values over random probe points.
double gradient_check(const core::BilevelProblem& problem, int points,
                      std::uint64_t seed);

struct LipschitzReport {
  bool pass = true;
  std::string binding_constant;  // first declared constant that failed
  double worst_ratio = 0.0;      // worst observed/declared ratio
};

// Sampled certification that the declared constants really bound the
// gradient-difference quotients within the declared domains.
LipschitzReport lipschitz_certification(const core::BilevelProblem& problem,
                                        int pairs, std::uint64_t seed);

// The full invariant battery across all modules.
std::vector<CheckResult> run_all_checks(const VerifyOptions& options = {});

// Pretty table; returns the number of failures.
int print_results(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace dpbo::verify

#endif
