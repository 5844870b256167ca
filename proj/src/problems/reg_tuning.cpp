#include "dpbo/problems/reg_tuning.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace dpbo::problems {

double regularizer_value(const Vec& theta, Regularizer reg,
                         double l2_smoothing) {
  if (reg == Regularizer::l2_squared) return theta.squaredNorm();
  return std::sqrt(theta.squaredNorm() + l2_smoothing * l2_smoothing);
}

namespace {

Vec regularizer_gradient(const Vec& theta, Regularizer reg,
                         double l2_smoothing) {
  if (reg == Regularizer::l2_squared) return 2.0 * theta;
  return theta / std::sqrt(theta.squaredNorm() + l2_smoothing * l2_smoothing);
}

}  // namespace

RegTuningProblem make_reg_tuning(std::shared_ptr<const core::Dataset> data,
                                 const RegTuningParams& params) {
  require(static_cast<bool>(data), ErrorCode::invalid_argument,
          "make_reg_tuning: dataset required");
  const int rec = data->record_dim();
  require(rec >= 3, ErrorCode::invalid_argument,
          "make_reg_tuning: records must be (features..., label, is_train)");
  const int d = rec - 2;
  const long long n = data->n();
  long long n_tr = 0;
  for (long long i = 0; i < n; ++i)
    if (data->sample(static_cast<int>(i))[d + 1] > 0.5) ++n_tr;
  const long long n_val = n - n_tr;
  require(n_tr >= 1 && n_val >= 1, ErrorCode::invalid_argument,
          "make_reg_tuning: both splits must be non-empty");
  require(params.n_train == 0 || params.n_train == n_tr,
          ErrorCode::config_error,
          "make_reg_tuning: declared n_train disagrees with the split flags");

  RegTuningProblem rt;
  rt.params = params;
  rt.n_train = n_tr;
  rt.n_val = n_val;
  rt.d_theta = d;

  const double tr_scale = static_cast<double>(n) / static_cast<double>(n_tr);
  const double val_scale = static_cast<double>(n) / static_cast<double>(n_val);
  const Regularizer reg = params.regularizer;
  const double smoothing = params.l2_smoothing;

  // Split-normalized moments (exact oracle machinery, also used for Delta_F).
  rt.gram_train = Mat::Zero(d, d);
  rt.gram_val = Mat::Zero(d, d);
  rt.moment_train = Vec::Zero(d);
  rt.moment_val = Vec::Zero(d);
  double max_feat = 0.0, max_label = 0.0;
  for (long long i = 0; i < n; ++i) {
    const auto xi = data->sample(static_cast<int>(i));
    const Vec a = xi.head(d);
    const double b = xi[d];
    max_feat = std::max(max_feat, a.norm());
    max_label = std::max(max_label, std::abs(b));
    if (xi[d + 1] > 0.5) {
      rt.gram_train += a * a.transpose();
      rt.moment_train += b * a;
      rt.label_sq_train += b * b;
    } else {
      rt.gram_val += a * a.transpose();
      rt.moment_val += b * a;
      rt.label_sq_val += b * b;
    }
  }
  rt.gram_train /= static_cast<double>(n_tr);
  rt.moment_train /= static_cast<double>(n_tr);
  rt.label_sq_train /= static_cast<double>(n_tr);
  rt.gram_val /= static_cast<double>(n_val);
  rt.moment_val /= static_cast<double>(n_val);
  rt.label_sq_val /= static_cast<double>(n_val);

  Eigen::SelfAdjointEigenSolver<Mat> eig(rt.gram_train);
  rt.gram_floor = eig.eigenvalues().minCoeff();
  double eps_reg = 0.0;
  if (rt.gram_floor < params.gram_floor_min) {
    eps_reg = params.eps_reg;
    rt.injected_reg = eps_reg;
  }

  core::BilevelProblem p;
  p.name = "reg_tuning";
  p.dim_x = 1;
  p.dim_y = d;
  p.data = data;

  p.grad_x_f = [](const Vec&, const Vec&, SampleRef, Vec& out) {
    out.setZero(1);
  };
  p.grad_y_f = [d, val_scale](const Vec&, const Vec& theta, SampleRef xi,
                              Vec& out) {
    if (xi[d + 1] > 0.5) {
      out.setZero(d);
      return;
    }
    const auto a = xi.head(d);
    out = (val_scale * (a.dot(theta) - xi[d])) * a;
  };
  p.grad_x_g = [reg, smoothing](const Vec&, const Vec& theta, SampleRef,
                                Vec& out) {
    out.resize(1);
    out[0] = regularizer_value(theta, reg, smoothing);
  };
  p.grad_y_g = [d, tr_scale, reg, smoothing, eps_reg](
                   const Vec& omega, const Vec& theta, SampleRef xi, Vec& out) {
    out = omega[0] * regularizer_gradient(theta, reg, smoothing);
    if (eps_reg > 0.0) out += eps_reg * theta;
    if (xi[d + 1] > 0.5) {
      const auto a = xi.head(d);
      out += (tr_scale * (a.dot(theta) - xi[d])) * a;
    }
  };
  p.f_value = [d, val_scale](const Vec&, const Vec& theta, SampleRef xi) {
    if (xi[d + 1] > 0.5) return 0.0;
    const auto a = xi.head(d);
    const double r = a.dot(theta) - xi[d];
    return 0.5 * val_scale * r * r;
  };
  p.g_value = [d, tr_scale, reg, smoothing, eps_reg](
                  const Vec& omega, const Vec& theta, SampleRef xi) {
    double v = omega[0] * regularizer_value(theta, reg, smoothing) +
               0.5 * eps_reg * theta.squaredNorm();
    if (xi[d + 1] > 0.5) {
      const auto a = xi.head(d);
      const double r = a.dot(theta) - xi[d];
      v += 0.5 * tr_scale * r * r;
    }
    return v;
  };
  p.hess_xy_g = [d, reg, smoothing](const Vec&, const Vec& theta, SampleRef,
                                    Mat& out) {
    out.resize(1, d);
    out.row(0) = regularizer_gradient(theta, reg, smoothing).transpose();
  };
  p.hess_yy_g = [d, tr_scale, reg, smoothing, eps_reg](
                    const Vec& omega, const Vec& theta, SampleRef xi, Mat& out) {
    if (reg == Regularizer::l2_squared) {
      out = (2.0 * omega[0] + eps_reg) * Mat::Identity(d, d);
    } else {
      const double s = std::sqrt(theta.squaredNorm() + smoothing * smoothing);
      out = (Mat::Identity(d, d) - theta * theta.transpose() / (s * s)) *
                (omega[0] / s) +
            eps_reg * Mat::Identity(d, d);
    }
    if (xi[d + 1] > 0.5) {
      const Vec a = xi.head(d);
      out += tr_scale * a * a.transpose();
    }
  };

  const double r_theta = params.theta_radius;
  const double resid_max = max_feat * r_theta + max_label;
  const double r_grad_max =
      reg == Regularizer::l2_squared ? 2.0 * r_theta : 1.0;
  const double r_val_max = reg == Regularizer::l2_squared
                               ? r_theta * r_theta
                               : std::sqrt(r_theta * r_theta +
                                           smoothing * smoothing);
  const double r_hess = reg == Regularizer::l2_squared
                            ? 2.0
                            : 1.0 / std::max(smoothing, 1e-12);

  core::ProblemConstants c;
  c.mu_g = std::max(rt.gram_floor, 0.0) + eps_reg;
  require(c.mu_g > 0.0, ErrorCode::config_error,
          "make_reg_tuning: data curvature floor is not positive; set eps_reg");
  {
    const double theta_part = tr_scale * resid_max * max_feat +
                              params.omega_cap * r_grad_max + eps_reg * r_theta;
    c.L0g = std::sqrt(r_val_max * r_val_max + theta_part * theta_part);
  }
  c.L1g = tr_scale * max_feat * max_feat + params.omega_cap * r_hess + eps_reg +
          r_grad_max;
  c.L0f = val_scale * resid_max * max_feat;
  c.L1f = val_scale * max_feat * max_feat;
  c.L2g = r_hess;

  rt.problem = std::move(p);

  // Delta_F via the exact ridge path (l2_squared); a generous generic bound
  // otherwise.
  if (reg == Regularizer::l2_squared) {
    double f0 = rt.validation_loss(params.omega_cap / 2.0);
    double fmin = f0;
    for (int k = 0; k <= 100; ++k) {
      const double w = params.omega_cap * k / 100.0;
      fmin = std::min(fmin, rt.validation_loss(w));
    }
    c.Delta_F = f0 - fmin + 1e-2;
  } else {
    c.Delta_F = 0.5 * val_scale * resid_max * resid_max + 1.0;
  }
  rt.problem.constants = c;

  rt.problem.feasible_x = geometry::ConvexSet::nonneg_orthant(1);
  rt.problem.inner_domain_radius = std::min(r_theta, c.L0g / c.mu_g);
  rt.problem.y_center = Vec::Zero(d);
  rt.problem.x_sample_radius = params.omega_cap;

  if (reg == Regularizer::l2_squared) {
    const Mat Gt = rt.gram_train, Gv = rt.gram_val;
    const Vec mt = rt.moment_train, mv = rt.moment_val;
    const double er = rt.injected_reg, lsq = rt.label_sq_val;
    const int dd = d;
    rt.problem.ref_y_star = [Gt, mt, er, dd](const Vec& omega) {
      const Mat H = Gt + (2.0 * omega[0] + er) * Mat::Identity(dd, dd);
      return Vec(H.ldlt().solve(mt));
    };
    rt.problem.ref_y_lambda = [Gt, Gv, mt, mv, er, dd](const Vec& omega,
                                                       double lambda) {
      const Mat H = Gv + lambda * Gt +
                    lambda * (2.0 * omega[0] + er) * Mat::Identity(dd, dd);
      return Vec(H.ldlt().solve(Vec(mv + lambda * mt)));
    };
    rt.problem.ref_F = [Gt, Gv, mt, mv, er, lsq, dd](const Vec& omega) {
      const Mat H = Gt + (2.0 * omega[0] + er) * Mat::Identity(dd, dd);
      const Vec theta = H.ldlt().solve(mt);
      return 0.5 * (theta.dot(Gv * theta) - 2.0 * theta.dot(mv) + lsq);
    };
  }
  rt.problem.validate();
  return rt;
}

Vec RegTuningProblem::ridge_theta(double omega) const {
  const int d = d_theta;
  const Mat H = gram_train +
                (2.0 * omega + injected_reg) * Mat::Identity(d, d);
  return H.ldlt().solve(moment_train);
}

double RegTuningProblem::validation_loss(double omega) const {
  const Vec theta = ridge_theta(omega);
  return 0.5 * (theta.dot(gram_val * theta) - 2.0 * theta.dot(moment_val) +
                label_sq_val);
}

Vec RegTuningProblem::mixed_theta(double omega, double lambda) const {
  const int d = d_theta;
  const Mat H = gram_val + lambda * gram_train +
                lambda * (2.0 * omega + injected_reg) * Mat::Identity(d, d);
  return H.ldlt().solve(Vec(moment_val + lambda * moment_train));
}

double RegTuningProblem::grid_search_omega(double lo, double hi, int coarse,
                                           int refine) const {
  require(lo >= 0.0 && hi > lo, ErrorCode::invalid_argument,
          "grid_search_omega: bad interval");
  double best = lo, best_val = validation_loss(lo);
  for (int k = 1; k <= coarse; ++k) {
    const double w = lo + (hi - lo) * k / coarse;
    const double v = validation_loss(w);
    if (v < best_val) {
      best_val = v;
      best = w;
    }
  }
  double a = std::max(lo, best - (hi - lo) / coarse);
  double b = std::min(hi, best + (hi - lo) / coarse);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = validation_loss(x1), f2 = validation_loss(x2);
  for (int k = 0; k < refine; ++k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = validation_loss(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = validation_loss(x2);
    }
  }
  return 0.5 * (a + b);
}

std::shared_ptr<const core::Dataset> make_reg_tuning_synthetic(
    const RegTuningSyntheticParams& s) {
  require(s.n >= 2 && s.n_train >= 1 && s.n_train < s.n,
          ErrorCode::invalid_argument, "make_reg_tuning_synthetic: bad split");
  privacy::Rng rng(s.seed);
  auto gen = rng.child("reg_tuning_data");
  const int d = s.d_theta;
  Vec theta0(d);
  for (int j = 0; j < d; ++j) theta0[j] = gen.gauss();
  theta0.normalize();

  Mat cols(d + 2, s.n);
  Vec a(d);
  for (long long i = 0; i < s.n; ++i) {
    for (int j = 0; j < d; ++j) a[j] = gen.gauss();
    a *= s.feature_norm / a.norm();
    const bool train = i < s.n_train;
    const double signal = train ? a.dot(theta0) : s.val_shrink * a.dot(theta0);
    const double label = signal + s.noise_sigma * gen.gauss();
    cols.col(i).head(d) = a;
    cols(d, i) = label;
    cols(d + 1, i) = train ? 1.0 : 0.0;
  }
  return std::make_shared<core::Dataset>(std::move(cols));
}

double private_reg_tuning_step(double omega_t, const Vec& theta_hat,
                               const Vec& theta_hat_lambda, double eta,
                               double lambda, double sigma2, Regularizer reg,
                               double l2_smoothing, privacy::Rng& rng) {
  require(omega_t >= 0.0, ErrorCode::invalid_argument,
          "private_reg_tuning_step: omega must be non-negative");
  const double dR = regularizer_value(theta_hat, reg, l2_smoothing) -
                    regularizer_value(theta_hat_lambda, reg, l2_smoothing);
  const double z = sigma2 > 0.0 ? std::sqrt(sigma2) * rng.gauss() : 0.0;
  return std::max(0.0, omega_t + eta * (lambda * dR - z));
}

RegTuningReport run_private_reg_tuning(const RegTuningProblem& rt,
                                       double omega0,
                                       const core::RunConfig& config,
                                       const outer::OuterParams& params,
                                       privacy::Rng& rng,
                                       const outer::InnerSolveFn& inner_override) {
  RegTuningReport report;
  Vec x0(1);
  x0[0] = omega0;
  report.run = outer::run_dp_bilevel(rt.problem, x0, rt.problem.y_center,
                                     config, params, rng, inner_override);
  for (const auto& x : report.run.iterates) report.omegas.push_back(x[0]);
  report.omega_out = report.run.x_out[0];
  return report;
}

}  // namespace dpbo::problems
