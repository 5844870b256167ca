#ifndef DPBO_OUTER_SOLVER_HPP
#define DPBO_OUTER_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpbo/core/types.hpp"
#include "dpbo/inner/solver.hpp"
#include "dpbo/privacy/ledger.hpp"

namespace dpbo::outer {

struct OuterParams {
  double lambda = 0.0;
  double sigma2 = 0.0;   // outer Gaussian variance
  double eta = 0.0;      // prox step size
  long long T = 0;       // outer iteration budget
  double alpha_target = 0.0;
  // Stationarity level the assignment certifies with probability 1 - gamma:
  // max(alpha_target, 8 beta_pred, 8 nu_pred, (4/3) sqrt(12 L_smooth
  // Delta_F / T)). The budget cannot certify below this at the given n.
  double alpha_certified = 0.0;

  privacy::PrivacyBudget budget;
  long long b_out = 0;  // 0 = full batch
  long long b_in = 0;   // 0 = full batch
  double gamma = 0.05;
  double clip = 0.0;

  // Per-mechanism budget: each iteration runs three (eps_call, delta_call)
  // mechanisms (two inner solves, one Gaussian); eps_call = eps_adv /
  // sqrt(18 T) where eps_adv is the largest budget whose T-fold
  // advanced-composed iterations stay within epsilon exactly.
  double eps_call = 0.0;
  double delta_call = 0.0;
  double eps_adv = 0.0;

  double sensitivity = 0.0;  // of the un-noised estimator (per slot if batched)
  double L_smooth = 0.0;
  double beta_predicted = 0.0;   // inexact-gradient bound from the inner radii
  double noise_norm_predicted = 0.0;

  inner::InnerParams inner_g;    // argmin_y g(x, .)
  inner::InnerParams inner_lam;  // argmin_y f(x, .) + lambda g(x, .)

  core::ConstantOverrides overrides;
  bool non_private = false;  // zero-noise diagnostic mode
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

// Theorem-style parameter assignment. alpha must satisfy
// alpha <= ell kappa^3 min{1/(2 kappa), L0g/L0f, L1g/L1f, Delta_F/(ell kappa)};
// violations report the binding constraint. inner_domain_radius <= 0 falls
// back to the worst-case bound L0g/mu_g.
OuterParams assign_outer_params(const core::ProblemConstants& constants,
                                double alpha,
                                const privacy::PrivacyBudget& budget,
                                long long n, int d_x, int d_y, long long b_out,
                                const core::RunConfig& config,
                                double inner_domain_radius = -1.0);

// Un-noised penalty hypergradient estimator
//   (1/|B|) sum_i [grad_x f_i(x, y_lam) + lambda (grad_x g_i(x, y_lam)
//                  - grad_x g_i(x, y_tilde))],
// over the full dataset when batch is null. clip > 0 norm-clips each
// per-sample contribution before averaging.
Vec estimate_hypergradient(const core::BilevelProblem& problem, const Vec& x,
                           const Vec& y_tilde, const Vec& y_lambda,
                           double lambda,
                           const std::vector<int>* batch = nullptr,
                           double clip = 0.0);

// Smallest index attaining the minimum displacement.
int select_output(const std::vector<double>& displacements);

struct IterationDiagnostics {
  double displacement = 0.0;
  double estimate_norm = 0.0;
  double inner_g_radius = 0.0;    // final localization radius reached
  double inner_lam_radius = 0.0;
  double cumulative_epsilon = 0.0;
};

struct RunReport {
  std::vector<Vec> iterates;           // x_0 .. x_T
  std::vector<double> displacements;   // ||x_{t+1} - x_t||
  int t_out = 0;
  Vec x_out;
  std::vector<IterationDiagnostics> iterations;
  privacy::PrivacyLedger ledger;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  double wall_clock_sec = 0.0;
  std::string timestamp;
  nlohmann::ordered_json resolved_params;
  bool non_private = false;

  nlohmann::ordered_json to_json() const;
  void trajectory_csv(std::ostream& os) const;
};

// Generic inexact-gradient engine behind the bilevel loop: T noisy prox
// steps with the displacement-argmin output rule. The oracle returns the
// un-noised (possibly biased) gradient estimate; Gaussian noise of variance
// sigma2 is added here from the "outer_noise" child stream.
using GradientEstimateFn =
    std::function<Vec(long long t, const Vec& x, privacy::Rng& rng)>;

RunReport noisy_prox_descent(const GradientEstimateFn& oracle,
                             const geometry::ConvexSet& set, const Vec& x0,
                             double eta, double sigma2, long long T,
                             privacy::Rng& rng);

// Optional replacement for the private inner solves (exact diagnostic mode;
// keeps the solver library independent of the oracle library).
using InnerSolveFn = std::function<Vec(const core::BilevelProblem& problem,
                                       const Vec& x, bool penalty,
                                       double lambda)>;

// Full Algorithm-1/3 loop: two localized DP inner solves per iteration at
// (eps_call, delta_call) each, the noisy estimator step, the prox update,
// and the displacement-argmin output, with every mechanism recorded in the
// ledger (blocks "iter/t" compose per iteration, advanced across).
RunReport run_dp_bilevel(const core::BilevelProblem& problem, const Vec& x0,
                         const Vec& y0, const core::RunConfig& config,
                         const OuterParams& params, privacy::Rng& rng,
                         const InnerSolveFn& inner_override = nullptr);

}  // namespace dpbo::outer

#endif
