#ifndef DPBO_PROBLEMS_REG_TUNING_HPP
#define DPBO_PROBLEMS_REG_TUNING_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dpbo/core/types.hpp"
#include "dpbo/outer/solver.hpp"
#include "dpbo/privacy/rng.hpp"

namespace dpbo::problems {

enum class Regularizer { l2_squared, l2 };

struct RegTuningParams {
  long long n_train = 0;  // first n_train records are the training split
  Regularizer regularizer = Regularizer::l2_squared;
  double theta_radius = 1.5;  // model ball certifying the loss constants
  double omega_cap = 2.0;     // omega range over which constants are declared
  double gram_floor_min = 1e-3;  // minimum acceptable data curvature
  double eps_reg = 1e-2;      // curvature injected when the floor is too low
  double l2_smoothing = 1e-6;  // smoothing for the plain l2 regularizer
};

// Hyperparameter bilevel problem: x = omega >= 0 (d_x = 1), y = theta.
//   g_i = (n/n_tr) 1[train] loss_i(theta) + omega R(theta) (+ injected reg)
//   f_i = (n/n_val) 1[val] loss_i(theta)
// with the squared loss, so the ERM means equal the split-normalized train
// and validation losses and grad_omega g = R(theta) for every sample.
// Records are (features..., label, is_train).
struct RegTuningProblem {
  core::BilevelProblem problem;
  RegTuningParams params;
  double gram_floor = 0.0;
  double injected_reg = 0.0;  // > 0 when the curvature floor was injected
  long long n_train = 0, n_val = 0;
  int d_theta = 0;

  // Closed-form ridge machinery (l2_squared only; exact oracle for tests).
  Vec ridge_theta(double omega) const;
  double validation_loss(double omega) const;
  Vec mixed_theta(double omega, double lambda) const;  // argmin f + lambda g
  double grid_search_omega(double lo, double hi, int coarse = 200,
                           int refine = 60) const;

  Mat gram_train, gram_val;  // split-normalized Gram matrices
  Vec moment_train, moment_val;
  double label_sq_train = 0.0, label_sq_val = 0.0;
};

RegTuningProblem make_reg_tuning(std::shared_ptr<const core::Dataset> data,
                                 const RegTuningParams& params);

struct RegTuningSyntheticParams {
  long long n = 4000;
  long long n_train = 2000;
  int d_theta = 5;
  double feature_norm = 2.2360679774997896;  // sqrt(5); features on a sphere
  double noise_sigma = 0.25;
  double val_shrink = 0.6;  // validation labels follow shrink * theta0
  std::uint64_t seed = 11;
};

// Synthetic ridge data whose validation split prefers a shrunk model, so the
// optimal regularization stays interior at any sample size.
std::shared_ptr<const core::Dataset> make_reg_tuning_synthetic(
    const RegTuningSyntheticParams& params);

// One step of the closed-form private update
//   omega' = max{0, omega - eta (lambda (R(theta_lam) - R(theta)) + sigma z)}
// i.e. omega + eta lambda N(R(theta) - R(theta_lam), sigma^2/lambda^2),
// consuming exactly one standard normal draw. Matches the generic prox step
// of the outer loop bit for bit on shared draws.
double private_reg_tuning_step(double omega_t, const Vec& theta_hat,
                               const Vec& theta_hat_lambda, double eta,
                               double lambda, double sigma2,
                               Regularizer reg, double l2_smoothing,
                               privacy::Rng& rng);

double regularizer_value(const Vec& theta, Regularizer reg,
                         double l2_smoothing);

struct RegTuningReport {
  std::vector<double> omegas;  // omega_0 .. omega_T
  double omega_out = 0.0;
  outer::RunReport run;
};

// Full private tuning loop: the generic DP bilevel solver specialized to the
// reg-tuning problem (two private trainings per step, then the prox update
// on omega over the non-negative half-line).
RegTuningReport run_private_reg_tuning(const RegTuningProblem& rt,
                                       double omega0,
                                       const core::RunConfig& config,
                                       const outer::OuterParams& params,
                                       privacy::Rng& rng,
                                       const outer::InnerSolveFn& inner_override
                                       = nullptr);

}  // namespace dpbo::problems

#endif
