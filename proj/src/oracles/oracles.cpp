#include "dpbo/oracles/oracles.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "dpbo/privacy/rng.hpp"

namespace dpbo::oracles {

namespace {

Vec inner_gradient(const core::BilevelProblem& p, const Vec& x, const Vec& y,
                   InnerObjective which, double lambda) {
  Vec g = core::full_batch_gradient(p, core::GradKind::yg, x, y);
  if (which == InnerObjective::g) return g;
  Vec f = core::full_batch_gradient(p, core::GradKind::yf, x, y);
  return f + lambda * g;
}

double inner_smoothness(const core::BilevelProblem& p, InnerObjective which,
                        double lambda) {
  if (which == InnerObjective::g) return p.constants.L1g;
  return p.constants.L1f + lambda * p.constants.L1g;
}

}  // namespace

Vec solve_inner_exact(const core::BilevelProblem& problem, const Vec& x,
                      InnerObjective which, double lambda,
                      const SolveOptions& opts) {
  if (which == InnerObjective::f_plus_lambda_g) {
    require(lambda >= 2.0 * problem.constants.L1g / problem.constants.mu_g,
            ErrorCode::precondition_violated,
            "solve_inner_exact: lambda below 2 L1g / mu_g, strong convexity "
            "of f + lambda g is not certified");
  }
  const double step = 1.0 / inner_smoothness(problem, which, lambda);
  Vec y = problem.y_center;
  for (long long it = 0; it < opts.max_iters; ++it) {
    const Vec g = inner_gradient(problem, x, y, which, lambda);
    if (g.norm() <= opts.tol) return y;
    y -= step * g;
  }
  throw Error(ErrorCode::numerical_failure,
              "solve_inner_exact: tolerance " + std::to_string(opts.tol) +
                  " not reached within iteration cap");
}

Vec exact_hypergradient(const core::BilevelProblem& problem, const Vec& x,
                        const SolveOptions& opts) {
  const Vec y_star = solve_inner_exact(problem, x, InnerObjective::g, 0.0, opts);
  const Vec gx_f = core::full_batch_gradient(problem, core::GradKind::xf, x, y_star);
  const Vec gy_f = core::full_batch_gradient(problem, core::GradKind::yf, x, y_star);
  const Mat H_xy = core::full_batch_hessian_xy_g(problem, x, y_star);
  const Mat H_yy = core::full_batch_hessian_yy_g(problem, x, y_star);
  const Vec w = H_yy.ldlt().solve(gy_f);
  return gx_f - H_xy * w;
}

Vec penalty_gradient_exact(const core::BilevelProblem& problem, const Vec& x,
                           double lambda, const SolveOptions& opts) {
  const Vec y_star = solve_inner_exact(problem, x, InnerObjective::g, 0.0, opts);
  const Vec y_lam =
      solve_inner_exact(problem, x, InnerObjective::f_plus_lambda_g, lambda, opts);
  const Vec gx_f = core::full_batch_gradient(problem, core::GradKind::xf, x, y_lam);
  const Vec gx_g_lam =
      core::full_batch_gradient(problem, core::GradKind::xg, x, y_lam);
  const Vec gx_g_star =
      core::full_batch_gradient(problem, core::GradKind::xg, x, y_star);
  return gx_f + lambda * (gx_g_lam - gx_g_star);
}

std::vector<PenaltyDiagnostics> diagnostics_sweep(
    const core::BilevelProblem& problem, const Vec& x,
    const std::vector<double>& lambdas, const SolveOptions& opts) {
  require(static_cast<bool>(problem.f_value) &&
              static_cast<bool>(problem.g_value),
          ErrorCode::invalid_argument,
          "diagnostics_sweep: value oracles required");
  std::vector<PenaltyDiagnostics> out;
  const Vec y_star = solve_inner_exact(problem, x, InnerObjective::g, 0.0, opts);
  const Vec grad_F = exact_hypergradient(problem, x, opts);
  const double F = core::full_batch_value(problem, true, x, y_star);
  for (double lambda : lambdas) {
    const Vec y_lam = solve_inner_exact(problem, x,
                                        InnerObjective::f_plus_lambda_g, lambda,
                                        opts);
    PenaltyDiagnostics d;
    d.lambda = lambda;
    const double Lstar =
        core::full_batch_value(problem, true, x, y_lam) +
        lambda * (core::full_batch_value(problem, false, x, y_lam) -
                  core::full_batch_value(problem, false, x, y_star));
    d.value_gap = std::abs(Lstar - F);
    const Vec gx_f = core::full_batch_gradient(problem, core::GradKind::xf, x, y_lam);
    const Vec gx_g_lam =
        core::full_batch_gradient(problem, core::GradKind::xg, x, y_lam);
    const Vec gx_g_star =
        core::full_batch_gradient(problem, core::GradKind::xg, x, y_star);
    d.gradient_gap =
        (gx_f + lambda * (gx_g_lam - gx_g_star) - grad_F).norm();
    d.y_distance = (y_lam - y_star).norm();
    d.y_distance_bound =
        problem.constants.L0f / (lambda * problem.constants.mu_g);
    out.push_back(d);
  }
  return out;
}

void diagnostics_to_csv(const std::vector<PenaltyDiagnostics>& records,
                        std::ostream& os) {
  os << "lambda,value_gap,gradient_gap,y_distance,y_distance_bound\n";
  for (const auto& d : records) {
    os << d.lambda << ',' << d.value_gap << ',' << d.gradient_gap << ','
       << d.y_distance << ',' << d.y_distance_bound << '\n';
  }
}

double ylambda_lipschitz_check(const core::BilevelProblem& problem,
                               double lambda, int num_pairs,
                               std::uint64_t seed, const SolveOptions& opts) {
  privacy::Rng rng(seed);
  auto gen = rng.child("ylam_lip");
  double max_ratio = 0.0;
  for (int k = 0; k < num_pairs; ++k) {
    Vec x1(problem.dim_x), x2(problem.dim_x);
    for (int j = 0; j < problem.dim_x; ++j) {
      x1[j] = problem.x_sample_radius * (2.0 * gen.uniform01() - 1.0);
      x2[j] = problem.x_sample_radius * (2.0 * gen.uniform01() - 1.0);
    }
    x1 = problem.feasible_x.project(x1);
    x2 = problem.feasible_x.project(x2);
    const double dist = (x1 - x2).norm();
    if (dist < 1e-12) continue;  // degenerate pair
    const Vec y1 =
        solve_inner_exact(problem, x1, InnerObjective::f_plus_lambda_g, lambda, opts);
    const Vec y2 =
        solve_inner_exact(problem, x2, InnerObjective::f_plus_lambda_g, lambda, opts);
    max_ratio = std::max(max_ratio, (y1 - y2).norm() / dist);
  }
  return max_ratio;
}

Vec fd_gradient(const std::function<double(const Vec&)>& value, const Vec& x,
                double h) {
  if (h <= 0.0) h = 1e-5 * (1.0 + x.norm());
  Vec g(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = value(probe);
    probe[i] = x[i] - h;
    const double down = value(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double hyperobjective_value(const core::BilevelProblem& problem, const Vec& x,
                            const SolveOptions& opts) {
  const Vec y_star = solve_inner_exact(problem, x, InnerObjective::g, 0.0, opts);
  return core::full_batch_value(problem, true, x, y_star);
}

}  // namespace dpbo::oracles
