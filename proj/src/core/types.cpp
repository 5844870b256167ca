#include "dpbo/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace dpbo::core {

Dataset::Dataset(Mat records_as_columns) : records_(std::move(records_as_columns)) {
  require(records_.cols() >= 1, ErrorCode::invalid_argument,
          "Dataset: need at least one sample");
  require(records_.rows() >= 1, ErrorCode::invalid_argument,
          "Dataset: records must have at least one field");
}

Dataset Dataset::from_rows(const Mat& rows) { return Dataset(rows.transpose()); }

double ProblemConstants::ell() const {
  return std::max({L0f, L1f, L0g, L1g, L2g});
}

double ProblemConstants::kappa() const { return ell() / mu_g; }

void ProblemConstants::validate() const {
  require(L0f > 0 && L1f > 0 && L0g > 0 && L1g > 0 && L2g >= 0,
          ErrorCode::invalid_argument,
          "ProblemConstants: Lipschitz/smoothness constants must be positive");
  require(mu_g > 0, ErrorCode::invalid_argument,
          "ProblemConstants: mu_g must be positive");
  require(Delta_F > 0, ErrorCode::invalid_argument,
          "ProblemConstants: Delta_F must be positive");
}

void BilevelProblem::validate() const {
  require(dim_x >= 1 && dim_y >= 1, ErrorCode::invalid_argument,
          "BilevelProblem: dimensions must be at least 1");
  require(static_cast<bool>(data), ErrorCode::invalid_argument,
          "BilevelProblem: dataset missing");
  require(grad_x_f && grad_y_f && grad_x_g && grad_y_g,
          ErrorCode::invalid_argument,
          "BilevelProblem: all four gradient oracles are required");
  constants.validate();
  require(inner_domain_radius > 0, ErrorCode::invalid_argument,
          "BilevelProblem: inner_domain_radius must be positive");
  require(inner_domain_radius <= constants.L0g / constants.mu_g + 1e-12,
          ErrorCode::invalid_argument,
          "BilevelProblem: inner_domain_radius must not exceed L0g/mu_g");
  require(static_cast<int>(y_center.size()) == dim_y,
          ErrorCode::dimension_mismatch, "BilevelProblem: y_center dimension");
  require(feasible_x.dim() == dim_x, ErrorCode::dimension_mismatch,
          "BilevelProblem: feasible set dimension");
  if (!f_mask.empty())
    require(static_cast<int>(f_mask.size()) == n(), ErrorCode::invalid_argument,
            "BilevelProblem: f_mask size must equal n");
  if (!g_mask.empty())
    require(static_cast<int>(g_mask.size()) == n(), ErrorCode::invalid_argument,
            "BilevelProblem: g_mask size must equal n");
}

void RunConfig::validate(long long n) const {
  require(gamma > 0.0 && gamma < 1.0, ErrorCode::invalid_argument,
          "RunConfig: gamma must lie in (0, 1)");
  require(alpha_target > 0.0, ErrorCode::invalid_argument,
          "RunConfig: alpha_target must be positive");
  require(b_in >= 0 && b_in <= n, ErrorCode::invalid_argument,
          "RunConfig: need 0 <= b_in <= n");
  require(b_out >= 0 && b_out <= n, ErrorCode::invalid_argument,
          "RunConfig: need 0 <= b_out <= n");
}

std::string to_string(GradKind which) {
  switch (which) {
    case GradKind::xf:
      return "grad_x_f";
    case GradKind::yf:
      return "grad_y_f";
    case GradKind::xg:
      return "grad_x_g";
    case GradKind::yg:
      return "grad_y_g";
  }
  return "?";
}

namespace {

struct OracleView {
  const GradOracle* oracle;
  bool upper;  // f-side (masked by f_mask) or g-side
  int out_dim;
};

OracleView select(const BilevelProblem& p, GradKind which) {
  switch (which) {
    case GradKind::xf:
      return {&p.grad_x_f, true, p.dim_x};
    case GradKind::yf:
      return {&p.grad_y_f, true, p.dim_y};
    case GradKind::xg:
      return {&p.grad_x_g, false, p.dim_x};
    case GradKind::yg:
      return {&p.grad_y_g, false, p.dim_y};
  }
  throw Error(ErrorCode::invalid_argument, "select: bad GradKind");
}

void check_dims(const BilevelProblem& p, GradKind which, const Vec& x,
                const Vec& y) {
  require(static_cast<int>(x.size()) == p.dim_x, ErrorCode::dimension_mismatch,
          to_string(which) + ": x has dimension " + std::to_string(x.size()) +
              ", expected " + std::to_string(p.dim_x));
  require(static_cast<int>(y.size()) == p.dim_y, ErrorCode::dimension_mismatch,
          to_string(which) + ": y has dimension " + std::to_string(y.size()) +
              ", expected " + std::to_string(p.dim_y));
}

}  // namespace

Vec full_batch_gradient(const BilevelProblem& problem, GradKind which,
                        const Vec& x, const Vec& y) {
  check_dims(problem, which, x, y);
  const OracleView view = select(problem, which);
  const int n = problem.n();
  Vec acc = Vec::Zero(view.out_dim);
  Vec buf(view.out_dim);
  for (int i = 0; i < n; ++i) {
    const bool on = view.upper ? problem.f_on(i) : problem.g_on(i);
    if (!on) continue;
    (*view.oracle)(x, y, problem.data->sample(i), buf);
    acc += buf;
  }
  return acc / static_cast<double>(n);
}

Vec minibatch_gradient(const BilevelProblem& problem, GradKind which,
                       const Vec& x, const Vec& y,
                       const std::vector<int>& batch) {
  check_dims(problem, which, x, y);
  require(!batch.empty(), ErrorCode::invalid_argument,
          to_string(which) + ": batch must be non-empty");
  const OracleView view = select(problem, which);
  const int n = problem.n();
  Vec acc = Vec::Zero(view.out_dim);
  Vec buf(view.out_dim);
  for (int i : batch) {
    require(i >= 0 && i < n, ErrorCode::invalid_argument,
            to_string(which) + ": batch index out of range");
    const bool on = view.upper ? problem.f_on(i) : problem.g_on(i);
    if (!on) continue;
    (*view.oracle)(x, y, problem.data->sample(i), buf);
    acc += buf;
  }
  return acc / static_cast<double>(batch.size());
}

double full_batch_value(const BilevelProblem& problem, bool upper, const Vec& x,
                        const Vec& y) {
  const ValueOracle& oracle = upper ? problem.f_value : problem.g_value;
  require(static_cast<bool>(oracle), ErrorCode::invalid_argument,
          "full_batch_value: value oracle not provided");
  const int n = problem.n();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool on = upper ? problem.f_on(i) : problem.g_on(i);
    if (!on) continue;
    acc += oracle(x, y, problem.data->sample(i));
  }
  return acc / static_cast<double>(n);
}

namespace {

Mat full_batch_hessian(const BilevelProblem& problem, const HessOracle& oracle,
                       const char* name, const Vec& x, const Vec& y, int r,
                       int c) {
  require(static_cast<bool>(oracle), ErrorCode::invalid_argument,
          std::string(name) +
              ": second-order oracle not provided; use the finite-difference "
              "fallback instead");
  const int n = problem.n();
  Mat acc = Mat::Zero(r, c);
  Mat buf(r, c);
  for (int i = 0; i < n; ++i) {
    if (!problem.g_on(i)) continue;
    oracle(x, y, problem.data->sample(i), buf);
    acc += buf;
  }
  return acc / static_cast<double>(n);
}

}  // namespace

Mat full_batch_hessian_xy_g(const BilevelProblem& problem, const Vec& x,
                            const Vec& y) {
  return full_batch_hessian(problem, problem.hess_xy_g, "hess_xy_g", x, y,
                            problem.dim_x, problem.dim_y);
}

Mat full_batch_hessian_yy_g(const BilevelProblem& problem, const Vec& x,
                            const Vec& y) {
  return full_batch_hessian(problem, problem.hess_yy_g, "hess_yy_g", x, y,
                            problem.dim_y, problem.dim_y);
}

}  // namespace dpbo::core
