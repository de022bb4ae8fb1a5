#pragma once

// Adversarial fault injection. A plan is fixed before the run; each planned
// entry is materialized against live state when its slot arrives and recorded
// in the injection ledger, which is the ground truth joined against the audit
// log by (agent, timestamp).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaas/matcher.hpp"

namespace gaas::sim {

enum class FaultKind {
    oversized_position,
    low_cash_buy,
    short_sale,
    rsi_extreme,
    overtrading_burst,
};

const char* to_string(FaultKind k);
std::optional<FaultKind> fault_kind_from_string(const std::string& s);

/// entry in the shipped adversarial catalog
struct CatalogEntry {
    std::string family;  // prompt_injection | ambiguous_phrasing | mimic_compliance
    std::string payload;
    std::string expected_rule;
    std::string expected_type;               // coercive | normative | mimetic
    std::optional<TradeOrder> materialize;   // ambiguous phrasing as an order
};

std::vector<CatalogEntry> load_adversarial_catalog(const std::string& path);

struct FaultPlanEntry {
    int slot{0};             // trading day index, or essay scenario index
    std::string agent_id;    // trading target agent, or adversary id for text
    FaultKind kind{FaultKind::oversized_position};
    std::string asset;
    bool is_text{false};
    CatalogEntry attack;     // engaged when is_text
};

struct FaultPlan {
    std::vector<FaultPlanEntry> entries;
};

/// seeded plan: per_kind counts spread over [first_slot, days); assets and
/// agents rotate deterministically
FaultPlan generate_trading_fault_plan(std::uint64_t seed,
                                      const std::map<std::string, int>& per_kind, int days,
                                      const std::vector<std::string>& agents,
                                      const std::vector<std::string>& assets,
                                      int first_slot = 16);

/// schedules every catalog text family across essay scenarios
FaultPlan generate_essay_fault_plan(std::uint64_t seed,
                                    const std::vector<CatalogEntry>& catalog, int scenarios);

struct LedgerEntry {
    std::string run_id;
    std::int64_t timestamp{0};   // of the injected action; 0 when never materialized
    std::string agent_id;
    std::string fault_kind;      // FaultKind name or attack family
    std::string asset{"-"};
    std::string expected_rule{"-"};
    std::string expected_type{"-"};  // coercive | normative | mimetic
    std::string status;          // injected | inapplicable | padding
    std::string detail;
};

inline constexpr const char* kLedgerHeader =
    "run_id,timestamp,agent_id,fault_kind,asset,expected_rule,expected_type,status,detail";

void write_ledger_csv(const std::string& path, const std::vector<LedgerEntry>& entries);
std::vector<LedgerEntry> read_ledger_csv(const std::string& path);

}  // namespace gaas::sim
