#include "dpbo/problems/families.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "dpbo/privacy/rng.hpp"

namespace dpbo::problems {

core::BilevelProblem make_mean_leak(std::shared_ptr<const core::Dataset> data,
                                    double x_radius) {
  require(static_cast<bool>(data), ErrorCode::invalid_argument,
          "make_mean_leak: dataset required");
  const int d = data->record_dim();
  const int n = data->n();
  const double nd = static_cast<double>(n);

  const Vec mean = data->records().rowwise().mean();
  double max_dev = 0.0;
  for (int i = 0; i < n; ++i)
    max_dev = std::max(max_dev, (data->sample(i) - mean).norm());

  core::BilevelProblem p;
  p.name = "mean_leak";
  p.dim_x = d;
  p.dim_y = d;
  p.data = data;

  p.grad_x_f = [](const Vec& x, const Vec& y, SampleRef, Vec& out) {
    out = x + y;
  };
  p.grad_y_f = [](const Vec& x, const Vec& y, SampleRef, Vec& out) {
    out = x + y;
  };
  p.grad_x_g = [d](const Vec&, const Vec&, SampleRef, Vec& out) {
    out.setZero(d);
  };
  p.grad_y_g = [nd](const Vec&, const Vec& y, SampleRef xi, Vec& out) {
    out = nd * (y - xi);
  };
  p.f_value = [](const Vec& x, const Vec& y, SampleRef) {
    return 0.5 * (x + y).squaredNorm();
  };
  p.g_value = [nd](const Vec&, const Vec& y, SampleRef xi) {
    return 0.5 * nd * (y - xi).squaredNorm();
  };
  p.hess_xy_g = [d](const Vec&, const Vec&, SampleRef, Mat& out) {
    out.setZero(d, d);
  };
  p.hess_yy_g = [nd, d](const Vec&, const Vec&, SampleRef, Mat& out) {
    out = nd * Mat::Identity(d, d);
  };

  const double r_y = max_dev + 1.0;
  const double r_x = x_radius > 0.0 ? x_radius : 1.0 + mean.norm();

  core::ProblemConstants c;
  c.mu_g = nd;
  c.L1g = nd;
  c.L0g = nd * (r_y + max_dev);
  c.L1f = 2.0;
  c.L0f = std::sqrt(2.0) * (r_x + mean.norm() + r_y);
  c.L2g = 0.0;
  c.Delta_F = 0.5 * mean.squaredNorm() + 1.0;
  p.constants = c;

  p.feasible_x = geometry::ConvexSet::whole_space(d);
  p.inner_domain_radius = r_y;
  p.y_center = mean;  // y*(x) for every x
  p.x_sample_radius = r_x;

  p.ref_y_star = [mean](const Vec&) { return mean; };
  p.ref_y_lambda = [mean, nd](const Vec& x, double lambda) {
    return Vec((lambda * nd * mean - x) / (1.0 + lambda * nd));
  };
  p.ref_grad_F = [mean](const Vec& x) { return Vec(x + mean); };
  p.ref_F = [mean](const Vec& x) { return 0.5 * (x + mean).squaredNorm(); };

  p.validate();
  return p;
}

namespace {

std::shared_ptr<const core::Dataset> generate_quadratic_data(
    const QuadraticFamilyParams& q) {
  privacy::Rng rng(q.seed);
  auto gen = rng.child("quadratic_data");
  Mat cols(q.dim_x + 2 * q.dim_y, q.n);
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < cols.rows(); ++j)
      cols(j, i) = q.offset_scale * gen.gauss();
  return std::make_shared<core::Dataset>(std::move(cols));
}

}  // namespace

core::BilevelProblem make_quadratic(const QuadraticFamilyParams& params) {
  return make_quadratic(params, generate_quadratic_data(params));
}

core::BilevelProblem make_quadratic(const QuadraticFamilyParams& q,
                                    std::shared_ptr<const core::Dataset> data) {
  require(q.dim_x >= 1 && q.dim_y >= 1 && q.n >= 1, ErrorCode::invalid_argument,
          "make_quadratic: bad dimensions");
  require(data->record_dim() == q.dim_x + 2 * q.dim_y,
          ErrorCode::dimension_mismatch,
          "make_quadratic: records must hold (a, b, c)");
  require(data->n() == q.n, ErrorCode::invalid_argument,
          "make_quadratic: dataset size mismatch");

  // A = coupling * G / ||G||_2 for a seeded Gaussian G.
  privacy::Rng rng(q.seed);
  auto gen = rng.child("quadratic_A");
  Mat A(q.dim_y, q.dim_x);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) A(i, j) = gen.gauss();
  const double gnorm = A.jacobiSvd().singularValues()(0);
  A *= q.coupling / gnorm;
  const double a_op = q.coupling;

  const int dx = q.dim_x, dy = q.dim_y, n = q.n;
  Vec a_bar = Vec::Zero(dx), b_bar = Vec::Zero(dy), c_bar = Vec::Zero(dy);
  double max_a = 0.0, max_cdev = 0.0, max_bdev_from_c = 0.0;
  double var_a = 0.0, var_b = 0.0;
  for (int i = 0; i < n; ++i) {
    a_bar += data->sample(i).head(dx);
    b_bar += data->sample(i).segment(dx, dy);
    c_bar += data->sample(i).tail(dy);
  }
  a_bar /= n;
  b_bar /= n;
  c_bar /= n;
  for (int i = 0; i < n; ++i) {
    const Vec ai = data->sample(i).head(dx);
    const Vec bi = data->sample(i).segment(dx, dy);
    const Vec ci = data->sample(i).tail(dy);
    max_a = std::max(max_a, ai.norm());
    max_cdev = std::max(max_cdev, (ci - c_bar).norm());
    max_bdev_from_c = std::max(max_bdev_from_c, (bi - c_bar).norm());
    var_a += (ai - a_bar).squaredNorm();
    var_b += (bi - b_bar).squaredNorm();
  }
  var_a /= n;
  var_b /= n;

  core::BilevelProblem p;
  p.name = "quadratic";
  p.dim_x = dx;
  p.dim_y = dy;
  p.data = data;

  p.grad_x_f = [dx](const Vec& x, const Vec&, SampleRef xi, Vec& out) {
    out = x - xi.head(dx);
  };
  p.grad_y_f = [dx, dy](const Vec&, const Vec& y, SampleRef xi, Vec& out) {
    out = y - xi.segment(dx, dy);
  };
  p.grad_y_g = [A, dy](const Vec& x, const Vec& y, SampleRef xi, Vec& out) {
    out = y - A * x - xi.tail(dy);
  };
  p.grad_x_g = [A, dy](const Vec& x, const Vec& y, SampleRef xi, Vec& out) {
    out = -A.transpose() * (y - A * x - xi.tail(dy));
  };
  p.f_value = [dx, dy](const Vec& x, const Vec& y, SampleRef xi) {
    return 0.5 * (x - xi.head(dx)).squaredNorm() +
           0.5 * (y - xi.segment(dx, dy)).squaredNorm();
  };
  p.g_value = [A, dy](const Vec& x, const Vec& y, SampleRef xi) {
    return 0.5 * (y - A * x - xi.tail(dy)).squaredNorm();
  };
  p.hess_xy_g = [A](const Vec&, const Vec&, SampleRef, Mat& out) {
    out = -A.transpose();
  };
  p.hess_yy_g = [dy](const Vec&, const Vec&, SampleRef, Mat& out) {
    out = Mat::Identity(dy, dy);
  };

  const double r_x = q.domain_radius_x;
  const double r_y = a_op * r_x + max_cdev + q.y_margin;

  core::ProblemConstants c;
  c.mu_g = 1.0;
  c.L1g = 1.0 + a_op * a_op;
  c.L0g = std::sqrt(1.0 + a_op * a_op) * (r_y + a_op * r_x + max_cdev);
  c.L1f = 1.0;
  {
    const double fx = r_x + max_a;
    const double fy = r_y + max_bdev_from_c;
    c.L0f = std::sqrt(fx * fx + fy * fy);
  }
  c.L2g = 0.0;

  // Closed forms.
  const double f_const = 0.5 * (var_a + var_b);
  auto ref_F = [=](const Vec& x) {
    const Vec ys = A * x + c_bar;
    return 0.5 * (x - a_bar).squaredNorm() + 0.5 * (ys - b_bar).squaredNorm() +
           f_const;
  };
  auto ref_grad_F = [=](const Vec& x) {
    return Vec((x - a_bar) + A.transpose() * (A * x + c_bar - b_bar));
  };

  // Delta_F from the unconstrained minimizer (a lower bound on inf F).
  {
    const Mat H = Mat::Identity(dx, dx) + A.transpose() * A;
    const Vec rhs = a_bar + A.transpose() * (b_bar - c_bar);
    const Vec x_star = H.ldlt().solve(rhs);
    c.Delta_F = ref_F(Vec::Zero(dx)) - ref_F(x_star) + 1e-3;
  }
  p.constants = c;

  p.feasible_x = geometry::ConvexSet::ball(Vec::Zero(dx), r_x);
  p.inner_domain_radius = r_y;
  p.y_center = c_bar;
  p.x_sample_radius = r_x;

  p.ref_y_star = [A, c_bar](const Vec& x) { return Vec(A * x + c_bar); };
  p.ref_y_lambda = [A, b_bar, c_bar](const Vec& x, double lambda) {
    return Vec((b_bar + lambda * (A * x + c_bar)) / (1.0 + lambda));
  };
  p.ref_grad_F = ref_grad_F;
  p.ref_F = ref_F;

  p.validate();
  return p;
}

Vec quadratic_grad_Lstar(const core::BilevelProblem& problem, const Vec& x,
                         double lambda) {
  require(static_cast<bool>(problem.ref_y_star) &&
              static_cast<bool>(problem.ref_y_lambda),
          ErrorCode::invalid_argument,
          "quadratic_grad_Lstar: closed-form references missing");
  const Vec y_star = problem.ref_y_star(x);
  const Vec y_lam = problem.ref_y_lambda(x, lambda);
  Vec gx_f = core::full_batch_gradient(problem, core::GradKind::xf, x, y_lam);
  Vec gx_g_lam =
      core::full_batch_gradient(problem, core::GradKind::xg, x, y_lam);
  Vec gx_g_star =
      core::full_batch_gradient(problem, core::GradKind::xg, x, y_star);
  return gx_f + lambda * (gx_g_lam - gx_g_star);
}

}  // namespace dpbo::problems
