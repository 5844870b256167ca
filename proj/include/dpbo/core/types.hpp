#ifndef DPBO_CORE_TYPES_HPP
#define DPBO_CORE_TYPES_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dpbo/common.hpp"
#include "dpbo/geometry/convex_set.hpp"

namespace dpbo::core {

// Sample records stored as columns so each record is contiguous.
class Dataset {
 public:
  explicit Dataset(Mat records_as_columns);

  int n() const { return static_cast<int>(records_.cols()); }
  int record_dim() const { return static_cast<int>(records_.rows()); }
  SampleRef sample(int i) const { return records_.col(i); }
  const Mat& records() const { return records_; }

  static Dataset from_rows(const Mat& rows);
  static Dataset from_csv(const std::string& path);

 private:
  Mat records_;
};

// Regularity constants declared by the problem (never auto-estimated; DP
// calibration depends on them being true bounds).
struct ProblemConstants {
  double L0f = 0.0;  // Lipschitz of per-sample f
  double L1f = 0.0;  // smoothness of f
  double L0g = 0.0;  // Lipschitz of per-sample g(x, .) over Y
  double L1g = 0.0;  // smoothness of per-sample g
  double L2g = 0.0;  // Hessian-smoothness of g
  double mu_g = 0.0;  // strong convexity of g(x, .)
  double Delta_F = 0.0;  // initial hyperobjective suboptimality bound

  double ell() const;    // max{L0f, L1f, L0g, L1g, L2g}
  double kappa() const;  // ell / mu_g
  void validate() const;
};

using GradOracle =
    std::function<void(const Vec& x, const Vec& y, SampleRef xi, Vec& out)>;
using ValueOracle =
    std::function<double(const Vec& x, const Vec& y, SampleRef xi)>;
using HessOracle =
    std::function<void(const Vec& x, const Vec& y, SampleRef xi, Mat& out)>;

// Per-sample oracle bundle. Per-sample gradients are the primitive; full and
// mini-batch gradients are always derived from them so sensitivity reasoning
// has a single source of truth.
struct BilevelProblem {
  std::string name;
  int dim_x = 0;
  int dim_y = 0;
  std::shared_ptr<const Dataset> data;

  GradOracle grad_x_f, grad_y_f, grad_x_g, grad_y_g;
  ValueOracle f_value, g_value;      // optional
  HessOracle hess_xy_g, hess_yy_g;   // optional, verification only

  ProblemConstants constants;
  geometry::ConvexSet feasible_x = geometry::ConvexSet::whole_space(1);
  // Y is the ball of this radius around y_center; bounded by L0g/mu_g.
  double inner_domain_radius = 0.0;
  Vec y_center;

  // Optional fixed a-priori masks excluding samples from f or g (the
  // excluded contributions are zero; the divisor stays n). Empty = all on.
  std::vector<std::uint8_t> f_mask, g_mask;

  // Sampling radius around the origin used by verification and property
  // tests when probing x.
  double x_sample_radius = 1.0;

  // Closed-form references attached by built-in families (tests only).
  std::function<Vec(const Vec&)> ref_y_star;
  std::function<Vec(const Vec&, double)> ref_y_lambda;
  std::function<Vec(const Vec&)> ref_grad_F;
  std::function<double(const Vec&)> ref_F;

  int n() const { return data ? data->n() : 0; }
  bool f_on(int i) const { return f_mask.empty() || f_mask[i] != 0; }
  bool g_on(int i) const { return g_mask.empty() || g_mask[i] != 0; }
  void validate() const;
};

struct ConstantOverrides {
  // Outer loop (Theorem-style assignment knobs).
  double C_lambda = 1.0;   // lambda = C_lambda * ell kappa^3 / alpha
  double C_T = 1.0;        // T = ceil(C_T * Delta_F ell kappa^3 / alpha^2)
  double C_eta = 1.0;      // eta = min(C_eta/(ell kappa^3), 1/(2 L_smooth))
  double C_smooth = 1.0;   // L_smooth = C_smooth * ell kappa^3
  double C_sigma = 1.0;    // multiplies the calibrated outer noise variance
  double C_L = 5.0;        // per-sample estimator Lipschitz prefactor
  // Inner solver.
  double C_R = 1.0;        // multiplies each localization radius
  double C_sigma_inner = 1.0;
  double T_cap = 1e6;      // cap on T_gd = n^2 (engagement is reported)
  bool zero_noise = false;  // diagnostic non-private mode
};

struct RunConfig {
  std::uint64_t seed = 1;
  double gamma = 0.05;         // failure probability
  double alpha_target = 0.1;   // stationarity target
  long long b_in = 0;          // 0 = full batch
  long long b_out = 0;         // 0 = full batch
  ConstantOverrides overrides;
  double clip = 0.0;           // per-sample clip threshold; 0 = off

  void validate(long long n) const;
};

enum class GradKind { xf, yf, xg, yg };

std::string to_string(GradKind which);

// Mean of per-sample gradients, fixed left-to-right summation order.
Vec full_batch_gradient(const BilevelProblem& problem, GradKind which,
                        const Vec& x, const Vec& y);

// Mean over an index multiset (sampling with replacement allowed).
Vec minibatch_gradient(const BilevelProblem& problem, GradKind which,
                       const Vec& x, const Vec& y,
                       const std::vector<int>& batch);

double full_batch_value(const BilevelProblem& problem, bool upper, const Vec& x,
                        const Vec& y);

Mat full_batch_hessian_xy_g(const BilevelProblem& problem, const Vec& x,
                            const Vec& y);
Mat full_batch_hessian_yy_g(const BilevelProblem& problem, const Vec& x,
                            const Vec& y);

}  // namespace dpbo::core

#endif
