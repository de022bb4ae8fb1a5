#pragma once

// Turns a proposed action plus evaluation context into the list of rules it
// violates. Evaluation is pure: same action, context, and compiled rules give
// the same violations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaas/rules.hpp"
#include "gaas/text_analysis.hpp"

namespace gaas {

enum class OrderSide { buy, sell };

const char* to_string(OrderSide s);
std::optional<OrderSide> order_side_from_string(const std::string& s);

struct TradeOrder {
    std::string asset;
    OrderSide side{OrderSide::buy};
    std::int64_t quantity{0};   // > 0
    double limit_price{0.0};    // > 0; harness fills at the daily close
};

enum class ActionKind { text_output, trade_order };

struct Action {
    std::string agent_id;
    ActionKind kind{ActionKind::text_output};
    std::string text;                  // text_output payload
    std::optional<TradeOrder> order;   // trade_order payload
    std::int64_t timestamp{0};         // unix seconds, UTC
    std::int64_t sequence{0};          // submitter-assigned tie-breaker
};

struct PortfolioState {
    double cash{0.0};
    std::map<std::string, std::int64_t> holdings;     // asset -> shares, never negative
    std::map<std::string, int> trades_today;          // asset -> executed count today
};

struct MarketSnapshot {
    std::map<std::string, double> last_close;
    std::map<std::string, double> rsi;  // present only where enough history exists
};

struct EvaluationContext {
    PortfolioState portfolio;
    MarketSnapshot market;
    const TextAnalyzer* text{nullptr};  // required for essay predicate rules
};

struct Violation {
    std::string rule_id;
    RuleType rule_type{RuleType::normative};
    double severity{0.0};
    std::string evidence;  // matched span or "field=value" rendering, never empty
};

/// Wilder-smoothed RSI over the full window; needs at least period+1 closes.
/// A window with zero average gain and zero average loss reports 50.
double compute_rsi(const std::vector<double>& closes, int period);

std::optional<Violation> eval_text_rule(const CompiledRule& rule, const std::string& text,
                                        const TextAnalyzer& analyzer);

std::optional<Violation> eval_trading_rule(const CompiledRule& rule, const TradeOrder& order,
                                           const EvaluationContext& ctx);

/// Runs every rule of the action's kind; returns violations in rule-set order.
std::vector<Violation> check_action(const Action& action, const EvaluationContext& ctx,
                                    const CompiledRuleSet& rules);

}  // namespace gaas
