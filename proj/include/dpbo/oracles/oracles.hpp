#ifndef DPBO_ORACLES_ORACLES_HPP
#define DPBO_ORACLES_ORACLES_HPP

#include <functional>
#include <vector>

#include "dpbo/core/types.hpp"

// Non-private verification machinery. This library is linked only by tests,
// verification, and the CLI; the solver library must not depend on it.
namespace dpbo::oracles {

enum class InnerObjective { g, f_plus_lambda_g };

struct SolveOptions {
  double tol = 1e-10;           // gradient-norm stopping criterion
  long long max_iters = 2'000'000;
};

// Deterministic fixed-step gradient descent on the full-batch inner
// objective. Returns y with || grad_y objective(x, y) || <= tol.
Vec solve_inner_exact(const core::BilevelProblem& problem, const Vec& x,
                      InnerObjective which, double lambda,
                      const SolveOptions& opts = {});

// grad F(x) = grad_x f - H_xy [H_yy]^{-1} grad_y f at (x, y*(x)), with a
// direct solve of the PD system.
Vec exact_hypergradient(const core::BilevelProblem& problem, const Vec& x,
                        const SolveOptions& opts = {});

// grad L*_lambda(x) = grad_x f(x, y^lam) + lambda (grad_x g(x, y^lam) -
// grad_x g(x, y*)), both inner points solved to tolerance.
Vec penalty_gradient_exact(const core::BilevelProblem& problem, const Vec& x,
                           double lambda, const SolveOptions& opts = {});

struct PenaltyDiagnostics {
  double lambda = 0.0;
  double value_gap = 0.0;      // |L*_lam(x) - F(x)|
  double gradient_gap = 0.0;   // ||grad L*_lam(x) - grad F(x)||
  double y_distance = 0.0;     // ||y^lam(x) - y*(x)||
  double y_distance_bound = 0.0;  // L0f / (lambda mu_g)
};

std::vector<PenaltyDiagnostics> diagnostics_sweep(
    const core::BilevelProblem& problem, const Vec& x,
    const std::vector<double>& lambdas, const SolveOptions& opts = {});

void diagnostics_to_csv(const std::vector<PenaltyDiagnostics>& records,
                        std::ostream& os);

// Max sampled ratio ||y^lam(x1) - y^lam(x2)|| / ||x1 - x2|| over random
// feasible pairs; the Lipschitz bound to compare against is 4 L1g / mu_g.
double ylambda_lipschitz_check(const core::BilevelProblem& problem,
                               double lambda, int num_pairs,
                               std::uint64_t seed,
                               const SolveOptions& opts = {});

// Central finite differences with step h (h <= 0 picks 1e-5 (1 + ||x||)).
Vec fd_gradient(const std::function<double(const Vec&)>& value, const Vec& x,
                double h = 0.0);

// F(x) = f(x, y*(x)) evaluated through the value oracles with a fresh inner
// solve; used as the probe target when differentiating F numerically.
double hyperobjective_value(const core::BilevelProblem& problem, const Vec& x,
                            const SolveOptions& opts = {});

}  // namespace dpbo::oracles

#endif
