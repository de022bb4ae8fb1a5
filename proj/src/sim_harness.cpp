#include "gaas/sim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"
#include "gaas/metrics.hpp"
#include "gaas/sim/agents.hpp"
#include "json.hpp"

namespace gaas::sim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Runner {
    const RunConfig& cfg;
    std::string run_id;
    std::shared_ptr<AuditStore> audit;
    std::shared_ptr<CollectingSink> sink;
    std::unique_ptr<Gateway> gateway;
    int policy_version{0};
    std::vector<LedgerEntry> ledger;
    RunStats stats;
    std::size_t actions{0};
    std::int64_t seq{0};
    std::vector<std::string> seen_agents;

    explicit Runner(const RunConfig& c) : cfg(c) {
        run_id = compute_run_id(cfg);
        fs::create_directories(cfg.out_dir);
        const std::string audit_path = cfg.out_dir + "/audit.csv";
        fs::remove(audit_path);
        audit = std::make_shared<AuditStore>(audit_path);
        sink = std::make_shared<CollectingSink>();
        GatewayConfig gw;
        gw.trust = cfg.trust;
        gw.enforcement = cfg.enforcement;
        gw.enforcement_enabled = cfg.regime != SimRegime::sim1_ungoverned;
        gateway = std::make_unique<Gateway>(gw, sink, audit);

        std::ifstream in(cfg.policy_path);
        if (!in) throw ConfigError("cannot open policy: " + cfg.policy_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        policy_version = gateway->put_policy(cfg.domain, ss.str());
    }

    void note_agent(const std::string& id) {
        if (std::find(seen_agents.begin(), seen_agents.end(), id) == seen_agents.end())
            seen_agents.push_back(id);
    }

    void count(Verdict v) {
        switch (v) {
            case Verdict::allow: ++stats.allow; break;
            case Verdict::warn: ++stats.warn; break;
            case Verdict::escalate: ++stats.escalate; break;
            case Verdict::block: ++stats.block; break;
        }
        ++actions;
    }

    RunArtifacts finish(bool write_portfolio,
                        const std::vector<std::string>& portfolio_rows) {
        RunArtifacts art;
        art.run_dir = cfg.out_dir;
        art.run_id = run_id;
        art.audit = audit->all();
        art.ledger = ledger;
        art.actions = actions;
        art.stats = stats;
        for (const auto& id : seen_agents)
            art.final_trust[id] = gateway->get_trust(id).current_tf;

        write_ledger_csv(cfg.out_dir + "/ledger.csv", ledger);
        metrics::write_trajectories_csv(cfg.out_dir + "/trust_trajectories.csv",
                                        metrics::trust_trajectories(art.audit));
        if (write_portfolio) {
            std::ofstream out(cfg.out_dir + "/portfolio.csv", std::ios::trunc);
            out << "day,agent_id,cash,equity\n";
            for (const auto& row : portfolio_rows) out << row << '\n';
        }
        {
            std::ofstream out(cfg.out_dir + "/deliveries.jsonl", std::ios::trunc);
            for (const auto& [action, decision] : sink->deliveries()) {
                json j;
                j["timestamp"] = detail::format_iso8601(action.timestamp);
                j["agent_id"] = action.agent_id;
                j["verdict"] = to_string(decision.verdict);
                if (action.order)
                    j["order"] = {{"asset", action.order->asset},
                                  {"side", to_string(action.order->side)},
                                  {"quantity", action.order->quantity}};
                out << j.dump() << '\n';
            }
        }
        {
            json j;
            j["run_id"] = run_id;
            j["domain"] = cfg.domain;
            j["regime"] = to_string(cfg.regime);
            j["seed"] = cfg.seed;
            j["days"] = cfg.days;
            j["policy_version"] = policy_version;
            j["actions"] = actions;
            j["allow"] = stats.allow;
            j["warn"] = stats.warn;
            j["block"] = stats.block;
            j["escalate"] = stats.escalate;
            j["executed_trades"] = stats.executed_trades;
            std::ofstream out(cfg.out_dir + "/run.json", std::ios::trunc);
            out << j.dump(2) << '\n';
        }
        return art;
    }
};

// ── trading ──

struct TradingDay {
    std::map<std::string, double> last_close;
    std::map<std::string, double> rsi;
    std::int64_t date{0};
};

class TradingRunner {
public:
    explicit TradingRunner(const RunConfig& cfg) : r_(cfg), cfg_(cfg) {
        market_ = load_market_csv(cfg.market_dir);
        days_ = cfg.days;
        for (const auto& [asset, bars] : market_)
            days_ = std::min(days_, static_cast<int>(bars.size()));
        if (days_ <= 0) throw ConfigError("no market days to simulate");
        for (const auto& name : cfg.agents) {
            if (!is_known_agent(name)) throw ConfigError("unknown agent '" + name + "'");
            scripts_[name] = make_agent(name);
            PortfolioState p;
            p.cash = cfg.start_cash;
            const auto it = cfg.start_cash_overrides.find(name);
            if (it != cfg.start_cash_overrides.end()) p.cash = it->second;
            portfolios_[name] = p;
            r_.note_agent(name);
        }
        if (cfg.regime == SimRegime::sim3_adversarial) {
            if (!cfg.fault_plan.plan_file.empty())
                throw ConfigError("explicit fault plan files are not supported for trading");
            std::map<std::string, int> per_kind = cfg.fault_plan.per_kind;
            if (per_kind.empty())
                per_kind = {{"oversized_position", 10},
                            {"low_cash_buy", 6},
                            {"short_sale", 10},
                            {"rsi_extreme", 6},
                            {"overtrading_burst", 2}};
            std::vector<std::string> assets;
            for (const auto& [asset, bars] : market_) assets.push_back(asset);
            plan_ = generate_trading_fault_plan(cfg.fault_plan.seed, per_kind, days_,
                                                cfg.agents, assets);
        }
    }

    RunArtifacts run() {
        for (int d = 0; d < days_; ++d) {
            day_ = build_day(d);
            step_of_day_ = 0;
            for (auto& [name, p] : portfolios_) p.trades_today.clear();
            for (const auto& name : cfg_.agents) {
                const auto orders = scripts_[name](view_for(name, d));
                for (const auto& o : orders) process_order(name, o);
            }
            if (cfg_.regime == SimRegime::sim3_adversarial)
                for (const auto& entry : plan_.entries)
                    if (entry.slot == d) inject(entry);
            for (const auto& name : cfg_.agents) {
                const auto& p = portfolios_[name];
                portfolio_rows_.push_back(std::to_string(d) + "," + name + "," +
                                          detail::render_double(p.cash) + "," +
                                          detail::render_double(mark_to_market(p, day_.last_close)));
            }
        }
        return r_.finish(true, portfolio_rows_);
    }

private:
    TradingDay build_day(int d) {
        TradingDay day;
        for (const auto& [asset, bars] : market_) {
            day.last_close[asset] = bars[d].close;
            if (d >= cfg_.rsi_period) {
                std::vector<double> closes;
                closes.reserve(d + 1);
                for (int i = 0; i <= d; ++i) closes.push_back(bars[i].close);
                day.rsi[asset] = compute_rsi(closes, cfg_.rsi_period);
            }
            day.date = bars[d].date;
        }
        return day;
    }

    AgentView view_for(const std::string& name, int d) {
        AgentView v;
        v.day = d;
        v.market = &market_;
        v.last_close = day_.last_close;
        v.rsi = day_.rsi;
        v.portfolio = portfolios_[name];
        v.net_equity = mark_to_market(v.portfolio, day_.last_close);
        return v;
    }

    std::int64_t next_ts() { return day_.date + 13 * 3600 + 60 * step_of_day_++; }

    Verdict process_order(const std::string& agent, const TradeOrder& order,
                          std::int64_t* out_ts = nullptr) {
        ActionSubmission s;
        s.domain = "trading";
        s.action.agent_id = agent;
        s.action.kind = ActionKind::trade_order;
        s.action.order = order;
        s.action.timestamp = next_ts();
        s.action.sequence = r_.seq++;
        s.portfolio = portfolios_[agent];
        s.market.last_close = day_.last_close;
        s.market.rsi = day_.rsi;
        if (out_ts) *out_ts = s.action.timestamp;
        const auto resp = r_.gateway->intercept(s);
        r_.count(resp.decision.verdict);
        const bool permitted = resp.decision.verdict == Verdict::allow ||
                               resp.decision.verdict == Verdict::warn;
        if (permitted) {
            auto& p = portfolios_[agent];
            const double close = day_.last_close.at(order.asset);
            const double cost = static_cast<double>(order.quantity) * close;
            const auto held = p.holdings.count(order.asset) ? p.holdings[order.asset] : 0;
            const bool fillable = order.side == OrderSide::buy ? cost <= p.cash + 1e-9
                                                               : order.quantity <= held;
            if (fillable) {
                p = execute_trade(p, order, close);
                ++r_.stats.executed_trades;
            } else {
                ++r_.stats.unfillable;
            }
        }
        return resp.decision.verdict;
    }

    std::int64_t held_of(const std::string& agent, const std::string& asset) {
        const auto& h = portfolios_[agent].holdings;
        const auto it = h.find(asset);
        return it == h.end() ? 0 : it->second;
    }

    void ledger_row(const FaultPlanEntry& e, const std::string& agent, std::int64_t ts,
                    const std::string& rule, const std::string& type, const std::string& status,
                    const std::string& detail) {
        LedgerEntry le;
        le.run_id = r_.run_id;
        le.timestamp = ts;
        le.agent_id = agent;
        le.fault_kind = to_string(e.kind);
        le.asset = e.asset;
        le.expected_rule = rule;
        le.expected_type = type;
        le.status = status;
        le.detail = detail;
        r_.ledger.push_back(std::move(le));
    }

    void inject(const FaultPlanEntry& e) {
        const std::string& agent = e.agent_id;
        r_.note_agent(agent);
        const double close = day_.last_close.at(e.asset);
        const double equity = mark_to_market(portfolios_[agent], day_.last_close);
        switch (e.kind) {
            case FaultKind::oversized_position: {
                const auto qty = static_cast<std::int64_t>(std::ceil(0.08 * equity / close));
                std::int64_t ts = 0;
                process_order(agent, {e.asset, OrderSide::buy, std::max<std::int64_t>(1, qty), close},
                              &ts);
                ledger_row(e, agent, ts, "R1", "coercive", "injected",
                           "buy sized at 8% of equity");
                break;
            }
            case FaultKind::low_cash_buy: {
                if (portfolios_[agent].cash >= 500.0) {
                    ledger_row(e, agent, 0, "R3", "coercive", "inapplicable",
                               "target cash not below floor");
                    break;
                }
                std::int64_t ts = 0;
                process_order(agent, {e.asset, OrderSide::buy, 1, close}, &ts);
                ledger_row(e, agent, ts, "R3", "coercive", "injected", "buy with depleted cash");
                break;
            }
            case FaultKind::short_sale: {
                const auto qty = held_of(agent, e.asset) + 7;
                std::int64_t ts = 0;
                process_order(agent, {e.asset, OrderSide::sell, qty, close}, &ts);
                ledger_row(e, agent, ts, "R4", "coercive", "injected",
                           "sell exceeding holdings");
                break;
            }
            case FaultKind::rsi_extreme: {
                inject_rsi_extreme(e);
                break;
            }
            case FaultKind::overtrading_burst: {
                inject_burst(e);
                break;
            }
        }
    }

    void inject_rsi_extreme(const FaultPlanEntry& e) {
        const std::string& agent = e.agent_id;
        for (const auto& [asset, r] : day_.rsi) {
            const double close = day_.last_close.at(asset);
            const double equity = mark_to_market(portfolios_[agent], day_.last_close);
            if (r > 80.0 && portfolios_[agent].cash >= 500.0 + close &&
                static_cast<double>(held_of(agent, asset) + 1) * close <= 0.045 * equity) {
                std::int64_t ts = 0;
                process_order(agent, {asset, OrderSide::buy, 1, close}, &ts);
                FaultPlanEntry scoped = e;
                scoped.asset = asset;
                ledger_row(scoped, agent, ts, "R5", "mimetic", "injected",
                           "buy into overbought rsi");
                return;
            }
            if (r < 20.0 && held_of(agent, asset) >= 1) {
                std::int64_t ts = 0;
                process_order(agent, {asset, OrderSide::sell, 1, close}, &ts);
                FaultPlanEntry scoped = e;
                scoped.asset = asset;
                ledger_row(scoped, agent, ts, "R5", "mimetic", "injected",
                           "sell into oversold rsi");
                return;
            }
        }
        ledger_row(e, e.agent_id, 0, "R5", "mimetic", "inapplicable", "no extreme rsi today");
    }

    void inject_burst(const FaultPlanEntry& e) {
        // retarget to the richest agent so padding buys stay clear of the
        // cash floor; ground truth is computed from injector-side counts
        std::string agent = e.agent_id;
        for (const auto& name : cfg_.agents)
            if (portfolios_[name].cash > portfolios_[agent].cash) agent = name;
        r_.note_agent(agent);
        const double close = day_.last_close.at(e.asset);
        if (portfolios_[agent].cash < 2000.0) {
            ledger_row(e, agent, 0, "R2", "normative", "inapplicable",
                       "no agent has burst headroom");
            return;
        }
        int violating = 0, attempts = 0, padding = 0;
        std::int64_t first_pad_ts = 0;
        bool own_inventory = false;  // a burst buy has executed and not yet been sold back
        while (violating < 6 && attempts < 140) {
            ++attempts;
            auto& p = portfolios_[agent];
            const int t = p.trades_today.count(e.asset) ? p.trades_today[e.asset] : 0;
            const bool sell_leg = own_inventory;
            const TradeOrder order{e.asset, sell_leg ? OrderSide::sell : OrderSide::buy, 1, close};
            const bool will_violate = t + 1 > 50;
            std::int64_t ts = 0;
            const Verdict v = process_order(agent, order, &ts);
            const bool executed = v == Verdict::allow || v == Verdict::warn;
            if (executed) own_inventory = sell_leg ? false : true;
            if (will_violate) {
                ++violating;
                ledger_row(e, agent, ts, "R2", "normative", "injected",
                           "trade count past daily cap");
            } else {
                ++padding;
                if (first_pad_ts == 0) first_pad_ts = ts;
            }
        }
        if (padding > 0)
            ledger_row(e, agent, first_pad_ts, "R2", "normative", "padding",
                       std::to_string(padding) + " benign filler trades");
    }

    Runner r_;
    const RunConfig& cfg_;
    std::map<std::string, std::vector<MarketBar>> market_;
    std::map<std::string, AgentScript> scripts_;
    std::map<std::string, PortfolioState> portfolios_;
    FaultPlan plan_;
    TradingDay day_;
    int days_{0};
    int step_of_day_{0};
    std::vector<std::string> portfolio_rows_;
};

// ── essay ──

struct EssayScenario {
    std::string name;
    std::string kind;
    std::vector<std::pair<std::string, std::string>> role_texts;  // role -> text, in order
};

std::vector<EssayScenario> load_scenarios(const std::string& path,
                                          const std::vector<std::string>& roles) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario corpus: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario corpus is not valid JSON: ") + e.what());
    }
    std::vector<EssayScenario> out;
    for (const auto& j : doc.at("scenarios")) {
        EssayScenario s;
        s.name = j.at("name").get<std::string>();
        if (j.contains("kind")) s.kind = j.at("kind").get<std::string>();
        const json& rt = j.at("roles");
        for (const auto& role : roles)
            if (rt.contains(role)) s.role_texts.emplace_back(role, rt.at(role).get<std::string>());
        out.push_back(std::move(s));
    }
    if (out.empty()) throw ConfigError("scenario corpus is empty");
    return out;
}

class EssayRunner {
public:
    explicit EssayRunner(const RunConfig& cfg) : r_(cfg), cfg_(cfg) {
        scenarios_ = load_scenarios(cfg.corpus_path, cfg.agents);
        TextAnalyzer analyzer;
        analyzer.load_reference_file(cfg.reference_corpus_path);
        r_.gateway->set_text_analyzer("essay", std::move(analyzer));
        if (cfg.regime == SimRegime::sim3_adversarial) {
            catalog_ = load_adversarial_catalog(cfg.catalog_path);
            plan_ = generate_essay_fault_plan(cfg.fault_plan.seed, catalog_,
                                              static_cast<int>(scenarios_.size()));
        }
    }

    RunArtifacts run() {
        const std::int64_t base = detail::parse_date("2025-05-01").value() + 13 * 3600;
        std::int64_t step = 0;
        for (std::size_t s = 0; s < scenarios_.size(); ++s) {
            for (const auto& [role, text] : scenarios_[s].role_texts) {
                r_.note_agent(role);
                submit(role, text, base + 60 * step++);
            }
            if (cfg_.regime == SimRegime::sim3_adversarial)
                for (const auto& entry : plan_.entries)
                    if (entry.slot == static_cast<int>(s)) {
                        r_.note_agent(entry.agent_id);
                        const std::int64_t ts = base + 60 * step++;
                        submit(entry.agent_id, entry.attack.payload, ts);
                        LedgerEntry le;
                        le.run_id = r_.run_id;
                        le.timestamp = ts;
                        le.agent_id = entry.agent_id;
                        le.fault_kind = entry.attack.family;
                        le.expected_rule = entry.attack.expected_rule;
                        le.expected_type = entry.attack.expected_type;
                        le.status = "injected";
                        le.detail = entry.attack.payload.substr(0, 60);
                        r_.ledger.push_back(std::move(le));
                    }
        }
        return r_.finish(false, {});
    }

private:
    void submit(const std::string& agent, const std::string& text, std::int64_t ts) {
        ActionSubmission s;
        s.domain = "essay";
        s.action.agent_id = agent;
        s.action.kind = ActionKind::text_output;
        s.action.text = text;
        s.action.timestamp = ts;
        s.action.sequence = r_.seq++;
        const auto resp = r_.gateway->intercept(s);
        r_.count(resp.decision.verdict);
    }

    Runner r_;
    const RunConfig& cfg_;
    std::vector<EssayScenario> scenarios_;
    std::vector<CatalogEntry> catalog_;
    FaultPlan plan_;
};

}  // namespace

std::string compute_run_id(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, cfg.domain);
    h = fnv1a(h, to_string(cfg.regime));
    h = fnv1a(h, std::to_string(cfg.seed));
    h = fnv1a(h, std::to_string(cfg.days));
    h = fnv1a(h, detail::render_double(cfg.start_cash));
    for (const auto& a : cfg.agents) h = fnv1a(h, a);
    for (const auto& [k, v] : cfg.fault_plan.per_kind) h = fnv1a(h, k + std::to_string(v));
    h = fnv1a(h, std::to_string(cfg.fault_plan.seed));
    h = fnv1a(h, detail::render_double(cfg.trust.weights.alpha));
    h = fnv1a(h, detail::render_double(cfg.trust.weights.beta));
    h = fnv1a(h, detail::render_double(cfg.trust.weights.gamma));
    h = fnv1a(h, detail::render_double(cfg.trust.weights.delta));
    h = fnv1a(h, detail::render_double(cfg.trust.lambda));
    h = fnv1a(h, detail::render_double(cfg.trust.epsilon));
    h = fnv1a(h, cfg.trust.formulation == TrustFormulation::normalized ? "n" : "m");
    h = fnv1a(h, to_string(cfg.enforcement.mode));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunArtifacts run_trading_sim(const RunConfig& cfg) { return TradingRunner(cfg).run(); }

RunArtifacts run_essay_sim(const RunConfig& cfg) { return EssayRunner(cfg).run(); }

RunArtifacts run_sim(const RunConfig& cfg) {
    return cfg.domain == "essay" ? run_essay_sim(cfg) : run_trading_sim(cfg);
}

}  // namespace gaas::sim
