#ifndef DPBO_PROBLEMS_FAMILIES_HPP
#define DPBO_PROBLEMS_FAMILIES_HPP

#include <cstdint>
#include <memory>
#include <optional>

#include "dpbo/core/types.hpp"

namespace dpbo::problems {

// Mean-leak example: f(x,y) = ||x+y||^2 / 2 is data-free, the inner problem
// g(x,y) = sum_i ||y - xi_i||^2 / 2 is minimized by the dataset mean, and the
// hypergradient at the origin reveals that mean. Per-sample g carries a
// factor n so the ERM mean reproduces the unnormalized sum.
core::BilevelProblem make_mean_leak(std::shared_ptr<const core::Dataset> data,
                                    double x_radius = 0.0);

struct QuadraticFamilyParams {
  int dim_x = 2;
  int dim_y = 2;
  int n = 16;
  double coupling = 0.3;       // operator norm of A
  double offset_scale = 0.3;   // spread of the per-sample targets a, b, c
  double domain_radius_x = 1.0;
  double y_margin = 1.0;       // slack added to the Y ball radius
  std::uint64_t seed = 7;
};

// f_i = ||x - a_i||^2/2 + ||y - b_i||^2/2, g_i = ||y - A x - c_i||^2/2.
// Everything is available in closed form: y*(x) = A x + mean(c),
// y^lam(x) = (mean(b) + lam (A x + mean(c))) / (1 + lam),
// grad F(x) = (x - mean(a)) + A^T (A x + mean(c) - mean(b)).
core::BilevelProblem make_quadratic(const QuadraticFamilyParams& params);

core::BilevelProblem make_quadratic(const QuadraticFamilyParams& params,
                                    std::shared_ptr<const core::Dataset> data);

// Closed-form penalty gradient for the quadratic family (test reference).
Vec quadratic_grad_Lstar(const core::BilevelProblem& problem, const Vec& x,
                         double lambda);

}  // namespace dpbo::problems

#endif
