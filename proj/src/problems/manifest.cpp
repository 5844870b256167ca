#include "dpbo/problems/manifest.hpp"

#include <filesystem>

namespace dpbo::problems {

namespace {

std::string resolve(const std::string& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::shared_ptr<const core::Dataset> dataset_from_params(
    const nlohmann::json& params, const std::string& base_dir) {
  if (params.contains("dataset_csv")) {
    const std::string path =
        resolve(base_dir, params.at("dataset_csv").get<std::string>());
    require(std::filesystem::exists(path), ErrorCode::config_error,
            "problem manifest: dataset file not found: " + path);
    return std::make_shared<core::Dataset>(core::Dataset::from_csv(path));
  }
  if (params.contains("points")) {
    const auto& pts = params.at("points");
    require(pts.is_array() && !pts.empty(), ErrorCode::config_error,
            "problem manifest: points must be a non-empty array");
    const int n = static_cast<int>(pts.size());
    const int d = static_cast<int>(pts.at(0).size());
    Mat cols(d, n);
    for (int i = 0; i < n; ++i) {
      require(static_cast<int>(pts.at(i).size()) == d, ErrorCode::config_error,
              "problem manifest: ragged points");
      for (int j = 0; j < d; ++j) cols(j, i) = pts.at(i).at(j).get<double>();
    }
    return std::make_shared<core::Dataset>(std::move(cols));
  }
  return nullptr;
}

void apply_constant_overrides(core::BilevelProblem& p,
                              const nlohmann::json& manifest) {
  if (!manifest.contains("constants")) return;
  const auto& c = manifest.at("constants");
  auto set = [&](const char* key, double& field) {
    if (c.contains(key)) field = c.at(key).get<double>();
  };
  set("L0f", p.constants.L0f);
  set("L1f", p.constants.L1f);
  set("L0g", p.constants.L0g);
  set("L1g", p.constants.L1g);
  set("L2g", p.constants.L2g);
  set("mu_g", p.constants.mu_g);
  set("Delta_F", p.constants.Delta_F);
  p.constants.validate();
}

}  // namespace

LoadedProblem load_problem(const nlohmann::json& manifest,
                           const std::string& base_dir) {
  require(manifest.contains("family"), ErrorCode::config_error,
          "problem manifest: missing \"family\"");
  const std::string family = manifest.at("family").get<std::string>();
  const nlohmann::json params = manifest.value("params", nlohmann::json::object());

  LoadedProblem out;
  if (family == "mean_leak") {
    auto data = dataset_from_params(params, base_dir);
    if (!data) {
      // Seeded Gaussian cloud.
      const int n = params.value("n", 64);
      const int d = params.value("dim", 2);
      const double scale = params.value("scale", 1.0);
      privacy::Rng rng(params.value("seed", std::uint64_t{3}));
      auto gen = rng.child("mean_leak_data");
      Mat cols(d, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) cols(j, i) = scale * gen.gauss();
      data = std::make_shared<core::Dataset>(std::move(cols));
    }
    out.problem = make_mean_leak(data, params.value("x_radius", 0.0));
  } else if (family == "quadratic") {
    QuadraticFamilyParams q;
    q.dim_x = params.value("dim_x", q.dim_x);
    q.dim_y = params.value("dim_y", q.dim_y);
    q.n = params.value("n", q.n);
    q.coupling = params.value("coupling", q.coupling);
    q.offset_scale = params.value("offset_scale", q.offset_scale);
    q.domain_radius_x = params.value("domain_radius_x", q.domain_radius_x);
    q.y_margin = params.value("y_margin", q.y_margin);
    q.seed = params.value("seed", q.seed);
    out.problem = make_quadratic(q);
  } else if (family == "reg_tuning") {
    RegTuningParams rp;
    rp.n_train = params.value("n_train", rp.n_train);
    rp.theta_radius = params.value("theta_radius", rp.theta_radius);
    rp.omega_cap = params.value("omega_cap", rp.omega_cap);
    rp.gram_floor_min = params.value("gram_floor_min", rp.gram_floor_min);
    rp.eps_reg = params.value("eps_reg", rp.eps_reg);
    const std::string reg = params.value("regularizer", std::string("l2_squared"));
    require(reg == "l2_squared" || reg == "l2", ErrorCode::config_error,
            "problem manifest: regularizer must be l2_squared or l2");
    rp.regularizer = reg == "l2" ? Regularizer::l2 : Regularizer::l2_squared;

    std::shared_ptr<const core::Dataset> data = dataset_from_params(params, base_dir);
    if (data) {
      // CSV rows are (features..., label); the declared split is prepended
      // as a flag column: the first n_train rows train, the rest validate.
      require(rp.n_train >= 1, ErrorCode::config_error,
              "problem manifest: reg_tuning from CSV requires n_train");
      Mat cols(data->record_dim() + 1, data->n());
      cols.topRows(data->record_dim()) = data->records();
      for (int i = 0; i < data->n(); ++i)
        cols(data->record_dim(), i) = i < rp.n_train ? 1.0 : 0.0;
      data = std::make_shared<core::Dataset>(std::move(cols));
    } else {
      RegTuningSyntheticParams sp;
      sp.n = params.value("n", sp.n);
      sp.n_train = params.value("n_train", sp.n / 2);
      sp.d_theta = params.value("d_theta", sp.d_theta);
      sp.feature_norm = params.value("feature_norm", sp.feature_norm);
      sp.noise_sigma = params.value("noise_sigma", sp.noise_sigma);
      sp.val_shrink = params.value("val_shrink", sp.val_shrink);
      sp.seed = params.value("seed", sp.seed);
      rp.n_train = sp.n_train;
      data = make_reg_tuning_synthetic(sp);
    }
    out.reg_tuning = make_reg_tuning(data, rp);
    out.problem = out.reg_tuning->problem;
  } else {
    throw Error(ErrorCode::config_error,
                "problem manifest: unknown family \"" + family + "\"");
  }
  apply_constant_overrides(out.problem, manifest);
  if (out.reg_tuning) out.reg_tuning->problem = out.problem;
  return out;
}

}  // namespace dpbo::problems
