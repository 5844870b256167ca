#ifndef DPBO_INNER_SOLVER_HPP
#define DPBO_INNER_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "dpbo/core/types.hpp"
#include "dpbo/privacy/ledger.hpp"
#include "dpbo/privacy/rng.hpp"

namespace dpbo::inner {

// Strongly-convex finite sum handle: h(y) = (1/n) sum_i h(y; xi_i) with each
// component L-Lipschitz over the working ball.
struct FiniteSumObjective {
  int n = 0;
  int dim = 0;
  std::function<void(const Vec& y, int i, Vec& out)> grad_i;
};

struct InnerParams {
  int M = 1;                 // localization rounds
  long long T_gd = 1;        // iterations per round
  double sigma2 = 0.0;       // per-step noise variance
  double mu = 0.0;           // strong convexity of the objective
  double L = 0.0;            // per-sample Lipschitz constant
  double eps_prime = 0.0;    // overall inner budget
  double delta_prime = 0.0;
  long long b_in = 0;        // batch size (== n means full batch)
  long long n = 0;
  int d_y = 0;
  std::vector<double> radii;  // R_0 .. R_M; R_M is the distance certificate

  // Per-step spend; K = M * T_gd of these compose to at most (eps', delta').
  double eps_step = 0.0;
  double delta_step = 0.0;
  double eps_tilde = 0.0;  // pre-amplification per-step epsilon

  bool t_cap_engaged = false;
  bool dim_condition_skipped = false;  // d_y == 1, see derive_inner_params
  bool zero_noise = false;
  double rho1 = 0.0, rho2 = 0.0;  // folded log factors in the radius recurrence

  double step_size(long long t) const {
    return 1.0 / (mu * static_cast<double>(t + 1));
  }
  long long total_steps() const { return static_cast<long long>(M) * T_gd; }
  double final_radius() const { return radii.back(); }
};

// Instantiates the localized solver: M = ceil(log2 ln(mu eps' n / L))
// clamped to >= 1 (natural log, pinned convention), T_gd = min(n^2, T_cap),
// eta_t = 1/(mu (t+1)), per-step noise calibrated through the privacy module
// so that K = M T_gd steps compose (amplified when b_in < n, then advanced)
// to exactly (eps', delta'). Radii follow
//   R_{m+1} = C_R (rho1 sqrt(R_m L / (mu eps' n)) + rho2 L sqrt(d_y)/(mu eps' n))
// where rho1, rho2 fold the concentration log factors implied by the
// calibrated noise; they are computed here and reported in the params.
// Requires n >= L R0^{2/ln(d_y)} / (mu eps') (skipped with a flag at d_y = 1,
// where the exponent is undefined).
InnerParams derive_inner_params(double mu, double L, long long n, int d_y,
                                double eps_prime, double delta_prime,
                                long long b_in, double R0,
                                const core::ConstantOverrides& overrides,
                                double gamma = 0.05);

struct InnerResult {
  Vec y_out;
  privacy::PrivacyLedger ledger;
  double max_ball_violation = 0.0;  // max over steps of ||y - center|| - R_m
  std::vector<double> round_radii;
  long long steps_run = 0;
};

// Localized noisy projected SGD: M rounds of T_gd steps inside the shrinking
// balls B(y_0^m, R_m), each round ending with the uniform iterate average.
// Sampling is with replacement; b_in == n runs deterministic full-batch
// gradients (the DP-Loc-GD path) and its accounting skips amplification.
InnerResult dp_loc_sgd(const FiniteSumObjective& objective, const Vec& y0,
                       const InnerParams& params, privacy::Rng& rng);

// Full-batch variant; same code path as dp_loc_sgd with b_in = n.
InnerResult dp_loc_gd(const FiniteSumObjective& objective, const Vec& y0,
                      const InnerParams& params, privacy::Rng& rng);

}  // namespace dpbo::inner

#endif
