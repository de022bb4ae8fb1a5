#include "gaas/sim/agents.hpp"

#include <cmath>

#include "gaas/errors.hpp"

namespace gaas::sim {

namespace {

constexpr int kWarmup = 15;  // bars before any script trades (RSI needs 15)

std::int64_t qty_for_value(double value, double close) {
    if (close <= 0) return 0;
    return static_cast<std::int64_t>(std::floor(value / close));
}

std::int64_t held(const AgentView& v, const std::string& asset) {
    const auto it = v.portfolio.holdings.find(asset);
    return it == v.portfolio.holdings.end() ? 0 : it->second;
}

// buy when the 5-day drift is up, trim when it is down
std::vector<TradeOrder> momentum(const AgentView& v) {
    std::vector<TradeOrder> orders;
    if (v.day < kWarmup) return orders;
    for (const auto& [asset, bars] : *v.market) {
        if (v.day >= static_cast<int>(bars.size()) || v.day < 5) continue;
        const double now = bars[v.day].close;
        const double then = bars[v.day - 5].close;
        if (now > then) {
            const auto qty = qty_for_value(0.03 * v.net_equity, now);
            if (qty > 0) orders.push_back({asset, OrderSide::buy, qty, now});
        } else if (now < then && held(v, asset) > 0) {
            const auto qty = std::min(held(v, asset), qty_for_value(0.03 * v.net_equity, now));
            if (qty > 0) orders.push_back({asset, OrderSide::sell, qty, now});
        }
    }
    return orders;
}

std::vector<TradeOrder> mean_reversion(const AgentView& v) {
    std::vector<TradeOrder> orders;
    if (v.day < kWarmup) return orders;
    for (const auto& [asset, r] : v.rsi) {
        const double close = v.last_close.at(asset);
        if (r < 35.0) {
            const auto qty = qty_for_value(0.03 * v.net_equity, close);
            if (qty > 0) orders.push_back({asset, OrderSide::buy, qty, close});
        } else if (r > 65.0 && held(v, asset) > 1) {
            orders.push_back({asset, OrderSide::sell, held(v, asset) / 2, close});
        }
    }
    return orders;
}

// never asks for anything governance would refuse
std::vector<TradeOrder> compliant_baseline(const AgentView& v) {
    std::vector<TradeOrder> orders;
    if (v.day < kWarmup) return orders;
    if (v.day % 10 == 9) {
        for (const auto& [asset, shares] : v.portfolio.holdings) {
            if (shares <= 0) continue;
            const auto rit = v.rsi.find(asset);
            if (rit != v.rsi.end() && rit->second < 25.0) continue;  // avoid momentum-mimic sells
            orders.push_back({asset, OrderSide::sell, shares, v.last_close.at(asset)});
        }
        return orders;
    }
    if (v.day % 3 != 0) return orders;
    for (const auto& [asset, close] : v.last_close) {
        const auto rit = v.rsi.find(asset);
        if (rit == v.rsi.end() || rit->second < 25.0 || rit->second > 75.0) continue;
        const auto qty = qty_for_value(0.02 * v.net_equity, close);
        if (qty <= 0) continue;
        const double cost = static_cast<double>(qty) * close;
        const double post_position = static_cast<double>(held(v, asset) + qty) * close;
        if (v.portfolio.cash - cost < 600.0) continue;
        if (post_position > 0.045 * v.net_equity) continue;
        orders.push_back({asset, OrderSide::buy, qty, close});
        break;  // one buy per cycle
    }
    return orders;
}

// one deliberate cap breach per five-day week, small buys in between
std::vector<TradeOrder> greedy_oversizer(const AgentView& v) {
    std::vector<TradeOrder> orders;
    if (v.day < kWarmup) return orders;
    const auto& [asset, close] = *v.last_close.begin();
    if (v.day % 5 == 2) {
        const auto qty =
            static_cast<std::int64_t>(std::ceil(0.08 * v.net_equity / close));
        if (qty > 0) orders.push_back({asset, OrderSide::buy, qty, close});
    } else if (v.day % 5 == 0) {
        const auto qty = qty_for_value(0.02 * v.net_equity, close);
        if (qty > 0) orders.push_back({asset, OrderSide::buy, qty, close});
    }
    return orders;
}

// starts underfunded (see start_cash_overrides); every buy trips the cash floor
std::vector<TradeOrder> low_cash_agent(const AgentView& v) {
    std::vector<TradeOrder> orders;
    if (v.day < kWarmup || v.day % 4 != 1) return orders;
    const auto& [asset, close] = *v.last_close.rbegin();
    orders.push_back({asset, OrderSide::buy, 1, close});
    return orders;
}

// Replay schedule: fourteen trades on days 16+3i+k, oversized buys except at
// i in {2, 7, 12} which go buy / sell-all / buy at four percent.
AgentScript make_replay(int k) {
    return [k](const AgentView& v) {
        std::vector<TradeOrder> orders;
        const int rel = v.day - 16 - k;
        if (rel < 0 || rel % 3 != 0) return orders;
        const int i = rel / 3;
        if (i > 13) return orders;
        const auto& [asset, close] = *v.last_close.begin();
        if (i == 2 || i == 12) {
            const auto qty = qty_for_value(0.04 * v.net_equity, close);
            orders.push_back({asset, OrderSide::buy, qty, close});
        } else if (i == 7) {
            const auto shares = held(v, asset);
            if (shares > 0) orders.push_back({asset, OrderSide::sell, shares, close});
        } else {
            const auto qty =
                static_cast<std::int64_t>(std::ceil(0.06 * v.net_equity / close));
            orders.push_back({asset, OrderSide::buy, qty, close});
        }
        return orders;
    };
}

}  // namespace

AgentScript make_agent(const std::string& name) {
    if (name == "momentum") return momentum;
    if (name == "mean_reversion") return mean_reversion;
    if (name == "compliant_baseline") return compliant_baseline;
    if (name == "greedy_oversizer") return greedy_oversizer;
    if (name == "low_cash_agent") return low_cash_agent;
    if (name == "replay_a") return make_replay(0);
    if (name == "replay_b") return make_replay(1);
    if (name == "replay_c") return make_replay(2);
    throw ConfigError("unknown agent script '" + name + "'");
}

bool is_known_agent(const std::string& name) {
    static const std::vector<std::string> names = {
        "momentum",   "mean_reversion", "compliant_baseline", "greedy_oversizer",
        "low_cash_agent", "replay_a",   "replay_b",           "replay_c"};
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

}  // namespace gaas::sim
