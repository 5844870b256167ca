#include "dpbo/outer/solver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace dpbo::outer {

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

nlohmann::ordered_json OuterParams::to_json() const {
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["sigma2"] = sigma2;
  j["eta"] = eta;
  j["T"] = T;
  j["alpha_target"] = alpha_target;
  j["alpha_certified"] = alpha_certified;
  j["budget"] = {{"epsilon", budget.epsilon}, {"delta", budget.delta}};
  j["b_out"] = b_out;
  j["b_in"] = b_in;
  j["gamma"] = gamma;
  j["clip"] = clip;
  j["eps_call"] = eps_call;
  j["delta_call"] = delta_call;
  j["eps_adv"] = eps_adv;
  j["sensitivity"] = sensitivity;
  j["L_smooth"] = L_smooth;
  j["beta_predicted"] = beta_predicted;
  j["noise_norm_predicted"] = noise_norm_predicted;
  j["non_private"] = non_private;
  auto inner_json = [](const inner::InnerParams& p) {
    nlohmann::ordered_json ij;
    ij["M"] = p.M;
    ij["T_gd"] = p.T_gd;
    ij["sigma2"] = p.sigma2;
    ij["mu"] = p.mu;
    ij["L"] = p.L;
    ij["eps_prime"] = p.eps_prime;
    ij["delta_prime"] = p.delta_prime;
    ij["b_in"] = p.b_in;
    ij["eps_step"] = p.eps_step;
    ij["delta_step"] = p.delta_step;
    ij["eps_tilde"] = p.eps_tilde;
    ij["t_cap_engaged"] = p.t_cap_engaged;
    ij["radii"] = p.radii;
    ij["rho1"] = p.rho1;
    ij["rho2"] = p.rho2;
    return ij;
  };
  if (!non_private) {
    j["inner_g"] = inner_json(inner_g);
    j["inner_lam"] = inner_json(inner_lam);
  }
  j["overrides"] = {{"C_lambda", overrides.C_lambda},
                    {"C_T", overrides.C_T},
                    {"C_eta", overrides.C_eta},
                    {"C_smooth", overrides.C_smooth},
                    {"C_sigma", overrides.C_sigma},
                    {"C_L", overrides.C_L},
                    {"C_R", overrides.C_R},
                    {"C_sigma_inner", overrides.C_sigma_inner},
                    {"T_cap", overrides.T_cap},
                    {"zero_noise", overrides.zero_noise}};
  j["warnings"] = warnings;
  return j;
}

OuterParams assign_outer_params(const core::ProblemConstants& constants,
                                double alpha,
                                const privacy::PrivacyBudget& budget,
                                long long n, int d_x, int d_y, long long b_out,
                                const core::RunConfig& config,
                                double inner_domain_radius) {
  constants.validate();
  require(alpha > 0.0, ErrorCode::invalid_argument,
          "assign_outer_params: alpha must be positive");
  require(n >= 1 && d_x >= 1 && d_y >= 1, ErrorCode::invalid_argument,
          "assign_outer_params: bad problem sizes");
  require(b_out >= 0 && b_out <= n, ErrorCode::invalid_argument,
          "assign_outer_params: need 0 <= b_out <= n");
  const core::ConstantOverrides& ov = config.overrides;
  const bool zero_noise = ov.zero_noise;
  if (!zero_noise) budget.validate();

  const double ell = constants.ell();
  const double kappa = constants.kappa();
  const double lk3 = ell * kappa * kappa * kappa;

  // Theorem precondition on alpha; report the binding constraint by name.
  {
    struct Bound {
      const char* name;
      double value;
    };
    const Bound bounds[] = {
        {"1/(2 kappa)", 1.0 / (2.0 * kappa)},
        {"L0g/L0f", constants.L0g / constants.L0f},
        {"L1g/L1f", constants.L1g / constants.L1f},
        {"Delta_F/(ell kappa)", constants.Delta_F / (ell * kappa)},
    };
    const Bound* binding = &bounds[0];
    for (const auto& b : bounds)
      if (b.value < binding->value) binding = &b;
    const double cap = lk3 * binding->value;
    require(alpha <= cap, ErrorCode::precondition_violated,
            std::string("assign_outer_params: alpha exceeds ell kappa^3 * ") +
                binding->name + " = " + std::to_string(cap));
  }

  OuterParams p;
  p.alpha_target = alpha;
  p.budget = budget;
  p.b_out = b_out;
  p.b_in = config.b_in;
  p.gamma = config.gamma;
  p.clip = config.clip;
  p.overrides = ov;
  p.non_private = zero_noise;

  const double lambda_min =
      std::max({2.0 * constants.L1g / constants.mu_g,
                constants.L0f / constants.L0g, constants.L1f / constants.L1g});
  p.lambda = std::max(ov.C_lambda * lk3 / alpha, lambda_min);

  p.T = static_cast<long long>(
      std::ceil(ov.C_T * constants.Delta_F * lk3 / (alpha * alpha)));
  if (p.T < 1) p.T = 1;

  p.L_smooth = ov.C_smooth * lk3;
  p.eta = std::min(ov.C_eta / lk3, 1.0 / (2.0 * p.L_smooth));

  const double Td = static_cast<double>(p.T);
  if (!zero_noise) {
    require(ov.C_sigma >= 1.0, ErrorCode::invalid_argument,
            "assign_outer_params: C_sigma < 1 would under-noise the "
            "calibrated mechanism");
    p.delta_call = budget.delta / (3.0 * (Td + 1.0));
    const double eps_iter = privacy::invert_advanced_composition(
        budget.epsilon, budget.delta / (Td + 1.0), p.T);
    p.eps_adv = eps_iter * std::sqrt(2.0 * Td);
    p.eps_call = eps_iter / 3.0;
    if (p.eps_call >= 1.0) {
      p.eps_call = 0.999;
      p.warnings.push_back(
          "per-call epsilon capped at 0.999 below the available budget "
          "(Gaussian mechanism validity range)");
    }

    const long long denom = (b_out >= 1 && b_out < n) ? b_out : n;
    const double lip = p.clip > 0.0 ? p.clip : ov.C_L * ell * kappa;
    p.sensitivity = 2.0 * lip / static_cast<double>(denom);
    double eps_gauss = p.eps_call;
    if (b_out >= 1 && b_out < n) {
      eps_gauss = privacy::invert_amplification(p.eps_call, b_out, n);
      require(eps_gauss < 1.0, ErrorCode::precondition_violated,
              "assign_outer_params: pre-amplification epsilon reaches 1; "
              "increase b_out");
    }
    p.sigma2 = ov.C_sigma *
               privacy::calibrate_gaussian(p.sensitivity, eps_gauss, p.delta_call);
  }

  // Inner assignments, shared by every iteration.
  const double y_radius = inner_domain_radius > 0.0
                              ? inner_domain_radius
                              : constants.L0g / constants.mu_g;
  const double eps_inner = zero_noise ? 1.0 : p.eps_call;
  const double delta_inner = zero_noise ? 0.5 : p.delta_call;
  p.inner_g = inner::derive_inner_params(
      constants.mu_g, constants.L0g, n, d_y, eps_inner, delta_inner,
      config.b_in, 2.0 * y_radius, ov, config.gamma);
  p.inner_lam = inner::derive_inner_params(
      p.lambda * constants.mu_g / 2.0, 2.0 * p.lambda * constants.L0g, n, d_y,
      eps_inner, delta_inner, config.b_in,
      2.0 * y_radius + constants.L0f / (p.lambda * constants.mu_g), ov,
      config.gamma);
  if (p.inner_g.t_cap_engaged || p.inner_lam.t_cap_engaged)
    p.warnings.push_back(
        "theory deviation: inner iteration budget T_gd = n^2 capped at T_cap");
  if (p.inner_g.dim_condition_skipped)
    p.warnings.push_back(
        "sample-size condition skipped at d_y = 1 (undefined exponent)");

  p.beta_predicted =
      (constants.L1f + p.lambda * constants.L1g) * p.inner_lam.final_radius() +
      p.lambda * constants.L1g * p.inner_g.final_radius();
  {
    const double s = std::log(2.0 * std::max(Td, 2.0) / config.gamma);
    p.noise_norm_predicted =
        std::sqrt(p.sigma2) *
        std::sqrt(d_x + 2.0 * std::sqrt(d_x * s) + 2.0 * s);
  }
  p.alpha_certified = std::max(
      {alpha, 8.0 * p.beta_predicted, 8.0 * p.noise_norm_predicted,
       (4.0 / 3.0) * std::sqrt(12.0 * p.L_smooth * constants.Delta_F / Td)});
  if (p.alpha_certified > alpha)
    p.warnings.push_back(
        "alpha_certified exceeds alpha_target: the budget cannot certify the "
        "requested stationarity at this sample size");
  return p;
}

Vec estimate_hypergradient(const core::BilevelProblem& problem, const Vec& x,
                           const Vec& y_tilde, const Vec& y_lambda,
                           double lambda, const std::vector<int>* batch,
                           double clip) {
  const int n = problem.n();
  Vec acc = Vec::Zero(problem.dim_x);
  Vec gf(problem.dim_x), gl(problem.dim_x), gt(problem.dim_x);
  auto contribution = [&](int i, Vec& out) {
    out.setZero();
    if (problem.f_on(i)) {
      problem.grad_x_f(x, y_lambda, problem.data->sample(i), gf);
      out += gf;
    }
    if (problem.g_on(i)) {
      problem.grad_x_g(x, y_lambda, problem.data->sample(i), gl);
      problem.grad_x_g(x, y_tilde, problem.data->sample(i), gt);
      out += lambda * (gl - gt);
    }
    if (clip > 0.0) {
      const double norm = out.norm();
      if (norm > clip) out *= clip / norm;
    }
  };
  Vec term(problem.dim_x);
  if (batch == nullptr) {
    for (int i = 0; i < n; ++i) {
      contribution(i, term);
      acc += term;
    }
    return acc / static_cast<double>(n);
  }
  require(!batch->empty(), ErrorCode::invalid_argument,
          "estimate_hypergradient: batch must be non-empty");
  for (int i : *batch) {
    require(i >= 0 && i < n, ErrorCode::invalid_argument,
            "estimate_hypergradient: batch index out of range");
    contribution(i, term);
    acc += term;
  }
  return acc / static_cast<double>(batch->size());
}

int select_output(const std::vector<double>& displacements) {
  require(!displacements.empty(), ErrorCode::invalid_argument,
          "select_output: empty displacement sequence");
  int best = 0;
  for (int t = 1; t < static_cast<int>(displacements.size()); ++t)
    if (displacements[t] < displacements[best]) best = t;
  return best;
}

RunReport noisy_prox_descent(const GradientEstimateFn& oracle,
                             const geometry::ConvexSet& set, const Vec& x0,
                             double eta, double sigma2, long long T,
                             privacy::Rng& rng) {
  require(eta > 0.0, ErrorCode::invalid_argument,
          "noisy_prox_descent: eta must be positive");
  require(T >= 1, ErrorCode::invalid_argument,
          "noisy_prox_descent: T must be at least 1");
  require(set.contains(x0), ErrorCode::precondition_violated,
          "noisy_prox_descent: x0 must be feasible");

  auto noise_rng = rng.child("outer_noise");
  const double sigma = std::sqrt(sigma2);

  RunReport report;
  report.seed = rng.seed();
  report.timestamp = iso_timestamp();
  const auto start = std::chrono::steady_clock::now();

  Vec x = set.project(x0);
  report.iterates.push_back(x);
  Vec noise(x.size());
  for (long long t = 0; t < T; ++t) {
    Vec g = oracle(t, x, rng);
    require(g.allFinite(), ErrorCode::numerical_failure,
            "noisy_prox_descent: non-finite gradient estimate at iteration " +
                std::to_string(t));
    if (sigma2 > 0.0) {
      noise_rng.gauss_vector(sigma, noise);
      g += noise;
    }
    const Vec next = geometry::prox_step(set, x, g, eta);
    const double disp = (next - x).norm();
    report.displacements.push_back(disp);
    IterationDiagnostics diag;
    diag.displacement = disp;
    diag.estimate_norm = g.norm();
    report.iterations.push_back(diag);
    x = next;
    report.iterates.push_back(x);
  }
  report.t_out = select_output(report.displacements);
  report.x_out = report.iterates[report.t_out];
  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

RunReport run_dp_bilevel(const core::BilevelProblem& problem, const Vec& x0,
                         const Vec& y0, const core::RunConfig& config,
                         const OuterParams& params, privacy::Rng& rng,
                         const InnerSolveFn& inner_override) {
  problem.validate();
  config.validate(problem.n());
  require(static_cast<int>(x0.size()) == problem.dim_x,
          ErrorCode::dimension_mismatch, "run_dp_bilevel: x0 dimension");
  require(static_cast<int>(y0.size()) == problem.dim_y,
          ErrorCode::dimension_mismatch, "run_dp_bilevel: y0 dimension");
  require(problem.feasible_x.contains(x0), ErrorCode::precondition_violated,
          "run_dp_bilevel: x0 must lie in the feasible set");

  const bool private_mode = !params.non_private;
  privacy::PrivacyLedger ledger =
      private_mode ? privacy::PrivacyLedger(params.budget)
                   : privacy::PrivacyLedger();

  inner::FiniteSumObjective obj_g;
  obj_g.n = problem.n();
  obj_g.dim = problem.dim_y;
  Vec x_current;  // bound by reference into the closures below
  Vec buf_f(problem.dim_y);
  obj_g.grad_i = [&problem, &x_current](const Vec& y, int i, Vec& out) {
    if (problem.g_on(i)) {
      problem.grad_y_g(x_current, y, problem.data->sample(i), out);
    } else {
      out.setZero();
    }
  };
  inner::FiniteSumObjective obj_lam;
  obj_lam.n = problem.n();
  obj_lam.dim = problem.dim_y;
  const double lambda = params.lambda;
  obj_lam.grad_i = [&problem, &x_current, lambda, &buf_f](const Vec& y, int i,
                                                          Vec& out) {
    out.setZero();
    if (problem.f_on(i)) {
      problem.grad_y_f(x_current, y, problem.data->sample(i), out);
    }
    if (problem.g_on(i)) {
      problem.grad_y_g(x_current, y, problem.data->sample(i), buf_f);
      out += lambda * buf_f;
    }
  };

  auto batch_rng = rng.child("outer_batch");
  std::vector<int> batch;
  const bool minibatch = params.b_out >= 1 && params.b_out < problem.n();
  if (minibatch) batch.resize(static_cast<size_t>(params.b_out));

  std::vector<IterationDiagnostics> inner_diags;
  inner_diags.reserve(static_cast<size_t>(params.T));

  GradientEstimateFn oracle = [&](long long t, const Vec& x,
                                  privacy::Rng& step_rng) {
    x_current = x;
    const std::string block = "iter/" + std::to_string(t);
    Vec y_tilde, y_lam;
    IterationDiagnostics diag;
    if (inner_override) {
      y_tilde = inner_override(problem, x, false, lambda);
      y_lam = inner_override(problem, x, true, lambda);
    } else {
      auto rng_g = step_rng.child("inner_g", static_cast<std::uint64_t>(t));
      auto rng_l = step_rng.child("inner_lam", static_cast<std::uint64_t>(t));
      inner::InnerResult res_g = inner::dp_loc_sgd(obj_g, y0, params.inner_g, rng_g);
      inner::InnerResult res_l =
          inner::dp_loc_sgd(obj_lam, y0, params.inner_lam, rng_l);
      y_tilde = res_g.y_out;
      y_lam = res_l.y_out;
      diag.inner_g_radius = params.inner_g.final_radius();
      diag.inner_lam_radius = params.inner_lam.final_radius();
    }
    if (private_mode) {
      ledger.record("inner/y_star", params.eps_call, params.delta_call,
                    privacy::CompositionRule::advanced, block);
      ledger.record("inner/y_lambda", params.eps_call, params.delta_call,
                    privacy::CompositionRule::advanced, block);
    }
    Vec estimate;
    if (minibatch) {
      for (auto& idx : batch)
        idx = static_cast<int>(batch_rng.uniform_int(problem.n()));
      estimate = estimate_hypergradient(problem, x, y_tilde, y_lam, lambda,
                                        &batch, params.clip);
      if (private_mode)
        ledger.record("outer/gaussian", params.eps_call, params.delta_call,
                      privacy::CompositionRule::amplified_advanced, block);
    } else {
      estimate = estimate_hypergradient(problem, x, y_tilde, y_lam, lambda,
                                        nullptr, params.clip);
      if (private_mode)
        ledger.record("outer/gaussian", params.eps_call, params.delta_call,
                      privacy::CompositionRule::advanced, block);
    }
    diag.estimate_norm = estimate.norm();
    diag.cumulative_epsilon = private_mode ? ledger.total().epsilon : 0.0;
    inner_diags.push_back(diag);
    return estimate;
  };

  RunReport report = noisy_prox_descent(oracle, problem.feasible_x, x0,
                                        params.eta, params.sigma2, params.T, rng);
  for (size_t t = 0; t < report.iterations.size() && t < inner_diags.size(); ++t) {
    report.iterations[t].inner_g_radius = inner_diags[t].inner_g_radius;
    report.iterations[t].inner_lam_radius = inner_diags[t].inner_lam_radius;
    report.iterations[t].cumulative_epsilon = inner_diags[t].cumulative_epsilon;
  }
  report.ledger = std::move(ledger);
  report.warnings = params.warnings;
  report.seed = rng.seed();
  report.non_private = params.non_private;
  report.resolved_params = params.to_json();
  return report;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["non_private"] = non_private;
  j["t_out"] = t_out;
  j["x_out"] = std::vector<double>(x_out.data(), x_out.data() + x_out.size());
  j["displacements"] = displacements;
  j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& it : iterations) {
    j["iterations"].push_back({{"displacement", it.displacement},
                               {"estimate_norm", it.estimate_norm},
                               {"inner_g_radius", it.inner_g_radius},
                               {"inner_lam_radius", it.inner_lam_radius},
                               {"cumulative_epsilon", it.cumulative_epsilon}});
  }
  j["ledger"] = ledger.to_json();
  j["warnings"] = warnings;
  j["resolved_params"] = resolved_params;
  // Volatile fields last so reports are comparable after stripping them.
  j["wall_clock_sec"] = wall_clock_sec;
  j["timestamp"] = timestamp;
  return j;
}

void RunReport::trajectory_csv(std::ostream& os) const {
  os << "t,displacement,estimate_norm,inner_g_radius,inner_lam_radius,"
        "cumulative_epsilon\n";
  for (size_t t = 0; t < iterations.size(); ++t) {
    const auto& it = iterations[t];
    os << t << ',' << it.displacement << ',' << it.estimate_norm << ','
       << it.inner_g_radius << ',' << it.inner_lam_radius << ','
       << it.cumulative_epsilon << '\n';
  }
}

}  // namespace dpbo::outer
