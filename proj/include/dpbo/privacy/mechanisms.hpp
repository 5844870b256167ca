#ifndef DPBO_PRIVACY_MECHANISMS_HPP
#define DPBO_PRIVACY_MECHANISMS_HPP

#include "dpbo/common.hpp"
#include "dpbo/privacy/rng.hpp"

namespace dpbo::privacy {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    require(epsilon > 0.0, ErrorCode::invalid_argument,
            "PrivacyBudget: epsilon must be positive");
    require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument,
            "PrivacyBudget: delta must lie in (0, 1)");
  }
};

struct GaussianMechanismParams {
  double sensitivity = 0.0;
  double sigma2 = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

// Minimal noise variance sigma^2 = 2 ln(1.25/delta) S^2 / eps^2 certifying
// (eps, delta)-DP for an L2-sensitivity-S query. Valid only for
// eps, delta in (0, 1); out-of-range budgets are rejected rather than
// extrapolated.
double calibrate_gaussian(double sensitivity, double epsilon, double delta);

GaussianMechanismParams make_gaussian_params(double sensitivity,
                                             double epsilon, double delta);

// v + N(0, sigma2 I). sigma2 == 0 returns v unchanged and consumes no
// randomness.
Vec add_gaussian_noise(const Vec& v, double sigma2, Rng& rng);

// T-fold adaptive composition of (eps0, delta0)-DP mechanisms:
// eps = sqrt(2 T ln(1/delta0)) eps0 + 2 T eps0^2, delta = (T+1) delta0.
// Requires eps0 < 1.
PrivacyBudget advanced_composition(double epsilon0, double delta0,
                                   long long T);

// Uniform-subsampling amplification for a batch of size b out of n:
// eps = ln(1 + (1 - (1 - 1/n)^b)(e^{eps0} - 1)), delta unchanged.
PrivacyBudget amplify_by_subsampling(double epsilon0, double delta0,
                                     long long b, long long n);

// Largest per-invocation eps0 such that the exact advanced composition of
// T invocations of (eps0, delta0) spends at most eps_total. Closed form of
// the quadratic 2 T x^2 + sqrt(2 T ln(1/delta0)) x = eps_total, shaved by
// one part in 10^12 so the recomposed total never exceeds the budget.
double invert_advanced_composition(double eps_total, double delta0,
                                   long long T);

// Pre-amplification eps needed so that subsampling b of n lands on
// eps_target. Exact inverse of amplify_by_subsampling.
double invert_amplification(double eps_target, long long b, long long n);

}  // namespace dpbo::privacy

#endif
