#include "dpbo/inner/solver.hpp"

#include <cmath>

namespace dpbo::inner {

InnerParams derive_inner_params(double mu, double L, long long n, int d_y,
                                double eps_prime, double delta_prime,
                                long long b_in, double R0,
                                const core::ConstantOverrides& overrides,
                                double gamma) {
  require(mu > 0.0 && L > 0.0 && R0 > 0.0, ErrorCode::invalid_argument,
          "derive_inner_params: mu, L, R0 must be positive");
  require(n >= 1, ErrorCode::invalid_argument, "derive_inner_params: n >= 1");
  require(d_y >= 1, ErrorCode::invalid_argument, "derive_inner_params: d_y >= 1");
  require(eps_prime > 0.0, ErrorCode::invalid_argument,
          "derive_inner_params: eps_prime must be positive");
  require(delta_prime > 0.0 && delta_prime < 1.0, ErrorCode::invalid_argument,
          "derive_inner_params: delta_prime must lie in (0, 1)");
  if (b_in == 0) b_in = n;
  require(b_in >= 1 && b_in <= n, ErrorCode::invalid_argument,
          "derive_inner_params: need 1 <= b_in <= n");
  require(gamma > 0.0 && gamma < 1.0, ErrorCode::invalid_argument,
          "derive_inner_params: gamma must lie in (0, 1)");

  InnerParams p;
  p.mu = mu;
  p.L = L;
  p.eps_prime = eps_prime;
  p.delta_prime = delta_prime;
  p.b_in = b_in;
  p.n = n;
  p.d_y = d_y;
  p.zero_noise = overrides.zero_noise;

  const double nd = static_cast<double>(n);

  if (d_y >= 2 && !p.zero_noise) {
    const double required = L * std::pow(R0, 2.0 / std::log(double(d_y))) /
                            (mu * eps_prime);
    require(nd >= required, ErrorCode::precondition_violated,
            "derive_inner_params: sample-size condition n >= L R0^{2/ln d_y} "
            "/ (mu eps') violated (need n >= " +
                std::to_string(required) + ", have " + std::to_string(n) + ")");
  } else if (d_y < 2) {
    p.dim_condition_skipped = true;
  }

  const double m_arg = std::log(mu * eps_prime * nd / L);
  p.M = m_arg > 1.0 ? static_cast<int>(std::ceil(std::log2(m_arg))) : 1;
  if (p.M < 1) p.M = 1;

  const double n2 = nd * nd;
  p.t_cap_engaged = overrides.T_cap < n2;
  p.T_gd = static_cast<long long>(std::min(n2, overrides.T_cap));
  if (p.T_gd < 1) p.T_gd = 1;

  const long long K = p.total_steps();
  if (!p.zero_noise) {
    require(overrides.C_sigma_inner >= 1.0, ErrorCode::invalid_argument,
            "derive_inner_params: C_sigma_inner < 1 would under-noise the "
            "calibrated mechanism");
    p.delta_step = delta_prime / (static_cast<double>(K) + 1.0);
    p.eps_step = privacy::invert_advanced_composition(eps_prime, p.delta_step, K);
    p.eps_tilde = (b_in < n)
                      ? privacy::invert_amplification(p.eps_step, b_in, n)
                      : p.eps_step;
    require(p.eps_tilde < 1.0, ErrorCode::precondition_violated,
            "derive_inner_params: per-step mechanism epsilon " +
                std::to_string(p.eps_tilde) +
                " reaches 1; raise T_cap or the batch size");
    const double sensitivity = 2.0 * L / static_cast<double>(b_in);
    p.sigma2 = overrides.C_sigma_inner *
               privacy::calibrate_gaussian(sensitivity, p.eps_tilde, p.delta_step);
  }

  // Radius recurrence. The statistical per-round distance bound for the
  // calibrated noise (martingale cross term + averaged noise + worst-case GD
  // term) is folded into rho1 and rho2 so the recurrence keeps the
  // theoretical shape with explicit log factors.
  const double T = static_cast<double>(p.T_gd);
  const double sampling_var =
      (b_in < n) ? 4.0 * L * L / static_cast<double>(b_in) : 0.0;
  const double s_tot = std::sqrt(p.sigma2 + sampling_var);
  const double log_term =
      std::log(4.0 * static_cast<double>(p.M) * T / gamma);
  const double a1 =
      (2.0 * std::sqrt(2.0) / mu) * s_tot * std::sqrt(log_term) / std::sqrt(T);
  const double a0 = 6.0 * d_y * p.sigma2 / (mu * mu * T) +
                    2.0 * L * L * (1.0 + std::log(T)) / (mu * mu * T);
  const double unit = L / (mu * eps_prime * nd);
  p.rho1 = std::sqrt(a1 / unit);
  p.rho2 = std::sqrt(a0) / (unit * std::sqrt(double(d_y)));

  p.radii.resize(p.M + 1);
  p.radii[0] = R0;
  for (int m = 0; m < p.M; ++m) {
    const double stat = std::sqrt(a1 * p.radii[m] + a0);
    p.radii[m + 1] = overrides.C_R * std::min(p.radii[m], stat);
    if (p.radii[m + 1] <= 0.0) p.radii[m + 1] = p.radii[m];
  }
  return p;
}

namespace {

void batch_gradient(const FiniteSumObjective& obj, const Vec& y,
                    const std::vector<int>& batch, Vec& buf, Vec& out) {
  out.setZero();
  for (int i : batch) {
    obj.grad_i(y, i, buf);
    out += buf;
  }
  out /= static_cast<double>(batch.size());
}

void full_gradient(const FiniteSumObjective& obj, const Vec& y, Vec& buf,
                   Vec& out) {
  out.setZero();
  for (int i = 0; i < obj.n; ++i) {
    obj.grad_i(y, i, buf);
    out += buf;
  }
  out /= static_cast<double>(obj.n);
}

}  // namespace

InnerResult dp_loc_sgd(const FiniteSumObjective& objective, const Vec& y0,
                       const InnerParams& params, privacy::Rng& rng) {
  require(objective.n >= 1 && objective.dim >= 1, ErrorCode::invalid_argument,
          "dp_loc_sgd: bad objective");
  require(static_cast<int>(y0.size()) == objective.dim,
          ErrorCode::dimension_mismatch, "dp_loc_sgd: y0 dimension");
  require(params.n == objective.n, ErrorCode::invalid_argument,
          "dp_loc_sgd: params derived for a different n");

  auto noise_rng = rng.child("inner_noise");
  auto batch_rng = rng.child("inner_batch");
  const bool full_batch = params.b_in == objective.n;
  const double sigma = std::sqrt(params.sigma2);

  InnerResult result;
  Vec center = y0;
  Vec y = y0;
  Vec grad(objective.dim), buf(objective.dim), noise(objective.dim);
  std::vector<int> batch(full_batch ? 0 : static_cast<size_t>(params.b_in));

  for (int m = 0; m < params.M; ++m) {
    const double R = params.radii[m];
    result.round_radii.push_back(R);
    y = center;
    Vec sum = Vec::Zero(objective.dim);
    for (long long t = 0; t < params.T_gd; ++t) {
      sum += y;
      if (full_batch) {
        full_gradient(objective, y, buf, grad);
      } else {
        for (auto& idx : batch)
          idx = static_cast<int>(batch_rng.uniform_int(objective.n));
        batch_gradient(objective, y, batch, buf, grad);
      }
      require(grad.allFinite(), ErrorCode::numerical_failure,
              "dp_loc_sgd: non-finite gradient at round " + std::to_string(m) +
                  " step " + std::to_string(t));
      if (params.sigma2 > 0.0) {
        noise_rng.gauss_vector(sigma, noise);
        grad += noise;
      }
      y -= params.step_size(t) * grad;
      const Vec diff = y - center;
      const double dist = diff.norm();
      if (dist > R) y = center + diff * (R / dist);
      result.max_ball_violation =
          std::max(result.max_ball_violation, (y - center).norm() - R);
      ++result.steps_run;
    }
    center = sum / static_cast<double>(params.T_gd);
  }

  result.y_out = center;
  if (!params.zero_noise) {
    result.ledger.record(
        "dp_loc_sgd", params.eps_step, params.delta_step,
        full_batch ? privacy::CompositionRule::advanced
                   : privacy::CompositionRule::amplified_advanced,
        "", static_cast<std::uint64_t>(params.total_steps()));
  }
  return result;
}

InnerResult dp_loc_gd(const FiniteSumObjective& objective, const Vec& y0,
                      const InnerParams& params, privacy::Rng& rng) {
  InnerParams p = params;
  p.b_in = objective.n;
  return dp_loc_sgd(objective, y0, p, rng);
}

}  // namespace dpbo::inner
