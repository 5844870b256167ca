#include "dpbo/privacy/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dpbo::privacy {

std::string to_string(CompositionRule rule) {
  switch (rule) {
    case CompositionRule::basic:
      return "basic";
    case CompositionRule::advanced:
      return "advanced";
    case CompositionRule::amplified_advanced:
      return "amplified+advanced";
  }
  return "?";
}

void PrivacyLedger::record(const std::string& label, double epsilon,
                           double delta, CompositionRule rule,
                           const std::string& block, std::uint64_t count) {
  require(epsilon >= 0.0, ErrorCode::invalid_argument,
          "PrivacyLedger::record: epsilon must be non-negative");
  require(delta >= 0.0 && delta < 1.0, ErrorCode::invalid_argument,
          "PrivacyLedger::record: delta must lie in [0, 1)");
  require(count >= 1, ErrorCode::invalid_argument,
          "PrivacyLedger::record: count must be at least 1");
  entries_.push_back(LedgerEntry{label, epsilon, delta, rule, block, count});
  check_budget();
}

void PrivacyLedger::record_amplified(const std::string& label, double epsilon0,
                                     double delta0, long long b, long long n,
                                     const std::string& block,
                                     std::uint64_t count) {
  const PrivacyBudget amplified = amplify_by_subsampling(epsilon0, delta0, b, n);
  record(label, amplified.epsilon, amplified.delta,
         CompositionRule::amplified_advanced, block, count);
}

namespace {

struct BlockBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t multiplicity = 1;
  bool all_basic = true;
};

}  // namespace

PrivacyBudget PrivacyLedger::total() const {
  std::map<std::string, BlockBudget> named_blocks;
  std::vector<BlockBudget> blocks;
  for (const auto& e : entries_) {
    if (e.block.empty()) {
      BlockBudget b;
      b.epsilon = e.epsilon;
      b.delta = e.delta;
      b.multiplicity = e.count;
      b.all_basic = (e.rule == CompositionRule::basic);
      blocks.push_back(b);
    } else {
      auto& b = named_blocks[e.block];
      b.epsilon += e.epsilon * static_cast<double>(e.count);
      b.delta += e.delta * static_cast<double>(e.count);
      b.all_basic = b.all_basic && (e.rule == CompositionRule::basic);
    }
  }
  for (const auto& [name, b] : named_blocks) blocks.push_back(b);

  PrivacyBudget result{0.0, 0.0};
  // Advanced-rule blocks grouped by exact per-block budget.
  std::map<std::pair<double, double>, std::uint64_t> groups;
  for (const auto& b : blocks) {
    if (b.all_basic) {
      result.epsilon += b.epsilon * static_cast<double>(b.multiplicity);
      result.delta += b.delta * static_cast<double>(b.multiplicity);
    } else {
      groups[{b.epsilon, b.delta}] += b.multiplicity;
    }
  }
  for (const auto& [budget, t] : groups) {
    const auto [eps0, delta0] = budget;
    require(eps0 < 1.0, ErrorCode::precondition_violated,
            "PrivacyLedger::total: advanced composition needs per-block "
            "epsilon < 1");
    if (eps0 == 0.0) {
      result.delta +=
          (static_cast<double>(t) + 1.0) * delta0;  // formula at eps0 = 0
      continue;
    }
    const PrivacyBudget composed =
        advanced_composition(eps0, delta0, static_cast<long long>(t));
    result.epsilon += composed.epsilon;
    result.delta += composed.delta;
  }
  return result;
}

void PrivacyLedger::check_budget() const {
  if (!hard_budget_) return;
  const PrivacyBudget t = total();
  if (t.epsilon > hard_budget_->epsilon || t.delta > hard_budget_->delta) {
    throw Error(ErrorCode::budget_exceeded,
                "PrivacyLedger: spend (" + std::to_string(t.epsilon) + ", " +
                    std::to_string(t.delta) + ") exceeds hard budget (" +
                    std::to_string(hard_budget_->epsilon) + ", " +
                    std::to_string(hard_budget_->delta) + ")");
  }
}

nlohmann::ordered_json PrivacyLedger::to_json() const {
  nlohmann::ordered_json j;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    nlohmann::ordered_json je;
    je["label"] = e.label;
    je["epsilon"] = e.epsilon;
    je["delta"] = e.delta;
    je["rule"] = to_string(e.rule);
    je["block"] = e.block;
    je["count"] = e.count;
    j["entries"].push_back(je);
  }
  const PrivacyBudget t = total();
  j["total"] = {{"epsilon", t.epsilon}, {"delta", t.delta}};
  if (hard_budget_) {
    j["hard_budget"] = {{"epsilon", hard_budget_->epsilon},
                        {"delta", hard_budget_->delta}};
  }
  return j;
}

}  // namespace dpbo::privacy
