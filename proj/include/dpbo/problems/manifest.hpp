#ifndef DPBO_PROBLEMS_MANIFEST_HPP
#define DPBO_PROBLEMS_MANIFEST_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "dpbo/problems/families.hpp"
#include "dpbo/problems/reg_tuning.hpp"

namespace dpbo::problems {

struct LoadedProblem {
  core::BilevelProblem problem;
  std::optional<RegTuningProblem> reg_tuning;
};

// JSON problem manifest: {"family": name, "params": {...}, "constants": {...}}.
// Families: "mean_leak" (points inline, from CSV, or generated),
// "quadratic" (generated), "reg_tuning" (synthetic or CSV + n_train).
// The optional "constants" object overrides individual declared constants.
LoadedProblem load_problem(const nlohmann::json& manifest,
                           const std::string& base_dir = "");

}  // namespace dpbo::problems

#endif
