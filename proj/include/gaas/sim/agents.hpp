#pragma once

// Scripted trading agents. Scripts are pure functions of the visible state;
// every run with the same data and seed replays the same order stream.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gaas/matcher.hpp"
#include "gaas/sim/market.hpp"

namespace gaas::sim {

struct AgentView {
    int day{0};  // 0-based bar index, aligned across assets
    const std::map<std::string, std::vector<MarketBar>>* market{nullptr};
    std::map<std::string, double> last_close;
    std::map<std::string, double> rsi;  // present once enough history exists
    PortfolioState portfolio;
    double net_equity{0.0};
};

using AgentScript = std::function<std::vector<TradeOrder>(const AgentView&)>;

/// momentum, mean_reversion, compliant_baseline, greedy_oversizer,
/// low_cash_agent, replay_a / replay_b / replay_c; throws ConfigError on
/// unknown names
AgentScript make_agent(const std::string& name);

/// true for names make_agent accepts
bool is_known_agent(const std::string& name);

}  // namespace gaas::sim
