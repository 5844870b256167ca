#include "dpbo/privacy/mechanisms.hpp"

#include <cmath>

namespace dpbo::privacy {

double calibrate_gaussian(double sensitivity, double epsilon, double delta) {
  require(sensitivity > 0.0, ErrorCode::invalid_argument,
          "calibrate_gaussian: sensitivity must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::precondition_violated,
          "calibrate_gaussian: epsilon must lie in (0, 1)");
  require(delta > 0.0 && delta < 1.0, ErrorCode::precondition_violated,
          "calibrate_gaussian: delta must lie in (0, 1)");
  return 2.0 * std::log(1.25 / delta) * sensitivity * sensitivity /
         (epsilon * epsilon);
}

GaussianMechanismParams make_gaussian_params(double sensitivity,
                                             double epsilon, double delta) {
  GaussianMechanismParams p;
  p.sensitivity = sensitivity;
  p.epsilon = epsilon;
  p.delta = delta;
  p.sigma2 = calibrate_gaussian(sensitivity, epsilon, delta);
  return p;
}

Vec add_gaussian_noise(const Vec& v, double sigma2, Rng& rng) {
  require(sigma2 >= 0.0, ErrorCode::invalid_argument,
          "add_gaussian_noise: sigma2 must be non-negative");
  if (sigma2 == 0.0) return v;
  Vec out = v;
  const double sigma = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * rng.gauss();
  return out;
}

PrivacyBudget advanced_composition(double epsilon0, double delta0,
                                   long long T) {
  require(epsilon0 >= 0.0 && epsilon0 < 1.0, ErrorCode::precondition_violated,
          "advanced_composition: epsilon0 must lie in [0, 1)");
  require(delta0 > 0.0 && delta0 < 1.0, ErrorCode::invalid_argument,
          "advanced_composition: delta0 must lie in (0, 1)");
  require(T >= 1, ErrorCode::invalid_argument,
          "advanced_composition: T must be at least 1");
  const double t = static_cast<double>(T);
  PrivacyBudget b;
  b.epsilon = std::sqrt(2.0 * t * std::log(1.0 / delta0)) * epsilon0 +
              2.0 * t * epsilon0 * epsilon0;
  b.delta = (t + 1.0) * delta0;
  return b;
}

PrivacyBudget amplify_by_subsampling(double epsilon0, double delta0,
                                     long long b, long long n) {
  require(b >= 1 && b <= n, ErrorCode::invalid_argument,
          "amplify_by_subsampling: need 1 <= b <= n");
  require(epsilon0 >= 0.0, ErrorCode::invalid_argument,
          "amplify_by_subsampling: epsilon0 must be non-negative");
  const double q =
      1.0 - std::pow(1.0 - 1.0 / static_cast<double>(n), static_cast<double>(b));
  PrivacyBudget out;
  out.epsilon = std::log1p(q * std::expm1(epsilon0));
  out.delta = delta0;
  return out;
}

double invert_advanced_composition(double eps_total, double delta0,
                                   long long T) {
  require(eps_total > 0.0, ErrorCode::invalid_argument,
          "invert_advanced_composition: eps_total must be positive");
  require(delta0 > 0.0 && delta0 < 1.0, ErrorCode::invalid_argument,
          "invert_advanced_composition: delta0 must lie in (0, 1)");
  require(T >= 1, ErrorCode::invalid_argument,
          "invert_advanced_composition: T must be at least 1");
  const double t = static_cast<double>(T);
  const double s = std::sqrt(2.0 * t * std::log(1.0 / delta0));
  // 2 t x^2 + s x - eps_total = 0, positive root.
  double x = (-s + std::sqrt(s * s + 8.0 * t * eps_total)) / (4.0 * t);
  x *= (1.0 - 1e-12);
  require(x < 1.0, ErrorCode::precondition_violated,
          "invert_advanced_composition: per-invocation epsilon would reach 1");
  return x;
}

double invert_amplification(double eps_target, long long b, long long n) {
  require(b >= 1 && b <= n, ErrorCode::invalid_argument,
          "invert_amplification: need 1 <= b <= n");
  require(eps_target >= 0.0, ErrorCode::invalid_argument,
          "invert_amplification: eps_target must be non-negative");
  const double q =
      1.0 - std::pow(1.0 - 1.0 / static_cast<double>(n), static_cast<double>(b));
  return std::log1p(std::expm1(eps_target) / q);
}

}  // namespace dpbo::privacy
