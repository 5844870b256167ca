#ifndef DPBO_PRIVACY_LEDGER_HPP
#define DPBO_PRIVACY_LEDGER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpbo/privacy/mechanisms.hpp"

namespace dpbo::privacy {

enum class CompositionRule { basic, advanced, amplified_advanced };

std::string to_string(CompositionRule rule);

struct LedgerEntry {
  std::string label;
  double epsilon = 0.0;
  double delta = 0.0;
  CompositionRule rule = CompositionRule::basic;
  // Entries sharing a non-empty block label basic-compose first (one
  // algorithm iteration); blocks then compose across by their rule.
  std::string block;
  std::uint64_t count = 1;
};

// Append-only spend ledger. The total is recomputed from the entries on
// every query, never cached:
//   1. entries sharing a block are basic-composed into one block budget;
//      a blockless entry is its own block with multiplicity `count`;
//   2. blocks whose entries are all basic-rule are summed;
//   3. the remaining blocks are grouped by exact (epsilon, delta) and each
//      group is advanced-composed over its total multiplicity;
//   4. the partial results are summed (basic composition).
// This mirrors the per-iteration/within-iteration composition chain of the
// solvers. Amplified entries are recorded post-amplification via
// record_amplified, which applies the subsampling lemma itself so the
// amplify-then-compose order cannot be bypassed.
class PrivacyLedger {
 public:
  PrivacyLedger() = default;
  explicit PrivacyLedger(PrivacyBudget hard_budget)
      : hard_budget_(hard_budget) {}

  void record(const std::string& label, double epsilon, double delta,
              CompositionRule rule, const std::string& block = "",
              std::uint64_t count = 1);

  // Records a subsampled mechanism: the stored epsilon is the amplified
  // value for a size-b batch out of n.
  void record_amplified(const std::string& label, double epsilon0,
                        double delta0, long long b, long long n,
                        const std::string& block = "",
                        std::uint64_t count = 1);

  PrivacyBudget total() const;

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  const std::optional<PrivacyBudget>& hard_budget() const {
    return hard_budget_;
  }
  bool empty() const { return entries_.empty(); }

  nlohmann::ordered_json to_json() const;

 private:
  void check_budget() const;

  std::vector<LedgerEntry> entries_;
  std::optional<PrivacyBudget> hard_budget_;
};

}  // namespace dpbo::privacy

#endif
