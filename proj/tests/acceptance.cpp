// Release gate. Ten end-to-end checks over the bundled fixtures and policy
// packs, one line of output per check; the process exits nonzero if any check
// fails. Timed checks enforce their own wall-clock budgets.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaas/audit.hpp"
#include "gaas/config.hpp"
#include "gaas/enforcement.hpp"
#include "gaas/gateway.hpp"
#include "gaas/metrics.hpp"
#include "gaas/rules.hpp"
#include "gaas/sim/faults.hpp"
#include "gaas/sim/harness.hpp"
#include "gaas/sim/market.hpp"
#include "gaas/text_analysis.hpp"
#include "gaas/trust.hpp"

namespace fs = std::filesystem;
using namespace gaas;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string config_path(const std::string& name) {
    return std::string(GAAS_CONFIG_DIR) + "/" + name;
}

std::string data_path(const std::string& name) {
    return std::string(GAAS_DATA_DIR) + "/" + name;
}

// 1. The constructed replay script against the bundled trading pack: 42 checks,
//    33 blocked, 9 executed.
void check_replay(const fs::path& tmp) {
    auto cfg = load_run_config(config_path("trading_sim2_replay.json"));
    cfg.out_dir = (tmp / "replay").string();
    const auto t0 = Clock::now();
    const auto art = sim::run_trading_sim(cfg);
    require(seconds_since(t0) < 5.0, "replay exceeded the 5s budget");
    require(art.actions == 42, "expected 42 checks, saw " + std::to_string(art.actions));
    require(art.stats.block == 33, "expected 33 blocks, saw " + std::to_string(art.stats.block));
    require(art.stats.executed_trades == 9,
            "expected 9 executed trades, saw " + std::to_string(art.stats.executed_trades));
}

// 2. A dense adversarial run in strict mode: every injected hard-risk fault
//    (oversized buys, depleted-cash buys, naked sells) must be blocked.
void check_coercive_completeness(const fs::path& tmp) {
    const auto market_dir = tmp / "adversarial_market";
    fs::create_directories(market_dir);
    for (const auto& [asset, bars] : sim::generate_market_data(991, {"AAA", "BBB", "CCC"}, 260))
        sim::write_market_csv((market_dir / (asset + ".csv")).string(), bars);

    RunConfig cfg;
    cfg.domain = "trading";
    cfg.policy_path = data_path("policies/trading_rules.json");
    cfg.regime = SimRegime::sim3_adversarial;
    cfg.enforcement.mode = EnforcementMode::strict;
    cfg.seed = 11;
    cfg.days = 260;
    cfg.agents = {"momentum", "mean_reversion", "compliant_baseline", "greedy_oversizer",
                  "low_cash_agent"};
    cfg.market_dir = market_dir.string();
    cfg.fault_plan.seed = 3;
    cfg.fault_plan.per_kind = {{"oversized_position", 5200},
                               {"short_sale", 5200},
                               {"low_cash_buy", 400},
                               {"rsi_extreme", 300},
                               {"overtrading_burst", 30}};
    cfg.out_dir = (tmp / "adversarial_run").string();

    const auto t0 = Clock::now();
    const auto art = sim::run_trading_sim(cfg);
    require(seconds_since(t0) < 30.0, "adversarial run exceeded the 30s budget");
    require(art.actions >= 10000,
            "run too small: " + std::to_string(art.actions) + " checks");
    const auto c = metrics::confusion(art.audit, art.ledger,
                                      metrics::HarmScope::coercive_injected, art.run_id);
    require(c.tp > 0, "no hard-risk fault materialized");
    require(c.fn == 0, std::to_string(c.fn) + " injected hard-risk faults slipped through");
    const auto prf = metrics::derive_prf(c);
    require(prf.recall.has_value() && *prf.recall == 1.0, "recall below 1.0");
}

// 3. Trust scoring over randomized histories: both formulations fall under
//    every added violation type, the main form equals its factored rewrite,
//    the normalized form caps at 1 exactly on clean histories, and the decay
//    sum reduces correctly at both lambda extremes.
void check_trust_formulas() {
    std::mt19937 rng(20250814u);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> lam(0.05, 1.0);
    std::uniform_real_distribution<double> eps(0.001, 0.5);
    std::uniform_real_distribution<double> sev(0.1, 1.0);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> nviol(0, 2);
    std::uniform_int_distribution<int> vtype(0, 2);

    const auto t0 = Clock::now();
    for (int i = 0; i < 1000; ++i) {
        TrustConfig cfg;
        cfg.weights = TrustWeights{weight(rng), weight(rng), weight(rng), weight(rng)};
        cfg.lambda = lam(rng);
        cfg.epsilon = eps(rng);

        const auto make_violation = [&](int t) {
            Violation v;
            v.rule_id = "R" + std::to_string(t + 1);
            v.rule_type = t == 0   ? RuleType::coercive
                          : t == 1 ? RuleType::normative
                                   : RuleType::mimetic;
            v.severity = sev(rng);
            v.evidence = "x";
            return v;
        };

        auto s = fresh_trust_state("a", cfg);
        const int n = len(rng);
        for (int k = 0; k < n; ++k) {
            std::vector<Violation> vs;
            const int m = nviol(rng);
            for (int j = 0; j < m; ++j) vs.push_back(make_violation(vtype(rng)));
            s = record_action(s, vs, cfg);
        }

        const auto& w = cfg.weights;
        const auto n_actions = static_cast<double>(s.n_actions);
        const double ssum = severity_sum(s.severity_events, s.n_actions, cfg.lambda);
        const double wsum = w.alpha + w.beta + w.gamma;
        const double vbar = (w.alpha * static_cast<double>(s.v_coercive) +
                             w.beta * static_cast<double>(s.v_normative) +
                             w.gamma * static_cast<double>(s.v_mimetic)) /
                            wsum;
        const double factored = wsum * (1.0 - vbar / n_actions) - w.delta * ssum;
        require(std::abs(trust_factor_main(s, cfg) - factored) <= 1e-12,
                "main form diverged from its factored rewrite");

        const auto clean = record_action(s, {}, cfg);
        for (int t = 0; t < 3; ++t) {
            const auto hit = record_action(s, {make_violation(t)}, cfg);
            require(trust_factor_main(hit, cfg) < trust_factor_main(clean, cfg),
                    "main form did not fall under a type-" + std::to_string(t) + " violation");
            require(trust_factor_normalized(hit, cfg) < trust_factor_normalized(clean, cfg),
                    "normalized form did not fall under a type-" + std::to_string(t) +
                        " violation");
        }

        const double numerator = w.alpha * static_cast<double>(s.v_coercive) +
                                 w.beta * static_cast<double>(s.v_normative) +
                                 w.gamma * static_cast<double>(s.v_mimetic) + w.delta * ssum;
        const double tfn = trust_factor_normalized(s, cfg);
        require(tfn <= 1.0, "normalized form exceeded 1");
        require((numerator == 0.0) == (tfn == 1.0), "normalized cap is not tight");

        double plain = 0.0, last = 0.0;
        for (const auto& e : s.severity_events) {
            plain += e.severity;
            if (e.t == s.n_actions) last += e.severity;
        }
        require(severity_sum(s.severity_events, s.n_actions, 1.0) == plain,
                "lambda=1 is not the plain sum");
        require(severity_sum(s.severity_events, s.n_actions, 0.0) == last,
                "lambda=0 does not reduce to the last action");
    }
    require(seconds_since(t0) < 5.0, "trust suite exceeded the 5s budget");
}

// 4. Every tier of the trust matrix, including both boundary equalities.
void check_decision_matrix() {
    const EnforcementConfig cfg;
    const auto violation = [](RuleType t) {
        Violation v;
        v.rule_id = "R";
        v.rule_type = t;
        v.severity = 0.5;
        v.evidence = "x";
        return v;
    };
    struct Row {
        RuleType type;
        double tf;
        Verdict want;
        bool flag;
    };
    const Row rows[] = {
        {RuleType::normative, 0.9, Verdict::allow, false},
        {RuleType::mimetic, 0.9, Verdict::allow, false},
        {RuleType::coercive, 0.9, Verdict::warn, false},
        {RuleType::normative, 0.55, Verdict::warn, false},
        {RuleType::mimetic, 0.55, Verdict::warn, false},
        {RuleType::coercive, 0.55, Verdict::block, false},
        {RuleType::normative, 0.1, Verdict::block, true},
        {RuleType::mimetic, 0.1, Verdict::block, true},
        {RuleType::coercive, 0.1, Verdict::block, true},
        // the upper boundary belongs to the middle tier
        {RuleType::normative, 0.7, Verdict::warn, false},
        {RuleType::coercive, 0.7, Verdict::block, false},
        // the lower boundary belongs to the low tier; just above it does not
        {RuleType::normative, 0.4, Verdict::block, true},
        {RuleType::coercive, 0.4, Verdict::block, true},
        {RuleType::normative, std::nextafter(0.4, 1.0), Verdict::warn, false},
    };
    for (const auto& r : rows) {
        bool flag = false;
        const auto got = matrix_verdict(violation(r.type), r.tf, cfg, flag);
        require(got == r.want, std::string("matrix verdict diverged at tf=") +
                                   std::to_string(r.tf) + " type=" + to_string(r.type));
        require(flag == r.flag,
                "escalation flag diverged at tf=" + std::to_string(r.tf));
    }
}

// 5. Exhaustive ordered tuples of size 0..4: the fold is the maximum verdict.
void check_priority_fold() {
    const Verdict all[] = {Verdict::allow, Verdict::warn, Verdict::escalate, Verdict::block};
    require(resolve_priority({}) == Verdict::allow, "empty fold is not allow");
    int combos = 0;
    for (int size = 1; size <= 4; ++size) {
        std::vector<int> idx(size, 0);
        while (true) {
            std::vector<Verdict> vs;
            int hi = 0;
            for (int k : idx) {
                vs.push_back(all[k]);
                hi = std::max(hi, k);
            }
            require(resolve_priority(vs) == all[hi], "fold is not the maximum");
            ++combos;
            int p = size - 1;
            while (p >= 0 && ++idx[p] == 4) idx[p--] = 0;
            if (p < 0) break;
        }
    }
    require(combos == 4 + 16 + 64 + 256, "enumeration incomplete");
}

// 6. Audit fidelity: randomized rows survive a file round trip bit-exactly,
//    the documented sample row parses to its stated fields, and every bundled
//    scenario keeps per-agent trust chains continuous.
void check_audit_fidelity(const fs::path& tmp) {
    std::mt19937 rng(4242);
    std::uniform_int_distribution<std::int64_t> ts(0, 4102444799LL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick4(0, 3);
    std::uniform_int_distribution<int> pick3(0, 2);
    const char* agents[] = {"a", "writer_agent", "desk_7", "x9"};
    const char* rules[] = {"R1", "R5", "R12", "risk.cap"};
    const char* types[] = {"coercive", "normative", "mimetic"};

    std::vector<AuditRecord> batch;
    batch.reserve(1000);
    for (int i = 0; i < 1000; ++i) {
        AuditRecord r;
        r.timestamp = ts(rng);
        r.agent_id = agents[pick4(rng)];
        r.decision = static_cast<Verdict>(pick4(rng));
        if (unit(rng) >= 0.25) {
            r.rule_id = rules[pick4(rng)];
            r.violation_type = types[pick3(rng)];
            r.severity = unit(rng);
        }
        r.trust_before = unit(rng) * 3.0 - 1.0;
        r.trust_after = unit(rng) * 3.0 - 1.0;
        batch.push_back(r);
    }
    const auto path = tmp / "roundtrip.csv";
    write_audit_csv(path.string(), batch);
    const auto back = read_audit_csv(path.string());
    require(back.size() == batch.size(), "row count changed in the round trip");
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& a = batch[i];
        const auto& b = back[i];
        require(a.timestamp == b.timestamp && a.agent_id == b.agent_id &&
                    a.rule_id == b.rule_id && a.violation_type == b.violation_type,
                "identity fields changed at row " + std::to_string(i));
        require(a.severity == b.severity && a.trust_before == b.trust_before &&
                    a.trust_after == b.trust_after && a.decision == b.decision,
                "numeric fields changed at row " + std::to_string(i));
    }

    const auto r =
        parse_csv_row("2025-05-01T13:25:48Z,writer_agent,R5,normative,0.7,0.82,0.78,warn", 2);
    require(r.timestamp == 1746105948, "sample row timestamp diverged");
    require(r.agent_id == "writer_agent" && r.rule_id == "R5" && r.violation_type == "normative",
            "sample row identity fields diverged");
    require(r.severity == 0.7 && r.trust_before == 0.82 && r.trust_after == 0.78,
            "sample row numeric fields diverged");
    require(r.decision == Verdict::warn, "sample row verdict diverged");

    const char* scenarios[] = {"trading_sim1", "trading_sim2", "trading_sim2_replay",
                               "trading_sim3",  "essay_sim1",  "essay_sim2",
                               "essay_sim3"};
    for (const auto* name : scenarios) {
        auto cfg = load_run_config(config_path(std::string(name) + ".json"));
        cfg.out_dir = (tmp / "chain" / name).string();
        const auto art = sim::run_sim(cfg);
        require(!art.audit.empty(), std::string(name) + " produced no audit rows");
        verify_trust_chain(art.audit);  // throws on the first gap
    }
}

// 7. Rerunning a scenario with the same config and seed reproduces every CSV
//    byte for byte.
void check_determinism(const fs::path& tmp) {
    const auto t0 = Clock::now();
    struct Job {
        const char* config;
        bool portfolio;
    };
    const Job jobs[] = {{"trading_sim3", true}, {"essay_sim3", false}};
    for (const auto& job : jobs) {
        fs::path dirs[2];
        for (int pass = 0; pass < 2; ++pass) {
            auto cfg = load_run_config(config_path(std::string(job.config) + ".json"));
            dirs[pass] =
                tmp / "determinism" / (std::string(job.config) + (pass == 0 ? "_a" : "_b"));
            cfg.out_dir = dirs[pass].string();
            sim::run_sim(cfg);
        }
        std::vector<std::string> files = {"audit.csv", "ledger.csv", "trust_trajectories.csv"};
        if (job.portfolio) files.push_back("portfolio.csv");
        for (const auto& f : files)
            require(slurp(dirs[0] / f) == slurp(dirs[1] / f),
                    std::string(job.config) + "/" + f + " differs between identical runs");
    }
    require(seconds_since(t0) < 30.0, "determinism checks exceeded the 30s budget");
}

// 8. On a fixed violation-rich trace, mean final trust strictly falls as each
//    weight sweeps up the ten-point grid.
void check_sweep_monotonicity(const fs::path& tmp) {
    const auto scenario = load_run_config(config_path("sweep_scenario.json"));
    for (const std::string param : {"alpha", "beta", "gamma", "delta"}) {
        metrics::SweepSpec spec;
        spec.parameter = param;
        for (int i = 1; i <= 10; ++i) spec.values.push_back(i / 10.0);
        spec.scenario = scenario;
        spec.scenario.out_dir = (tmp / "sweep" / param).string();
        const auto rows = metrics::sweep(spec);
        require(rows.size() == 10, "sweep did not cover the grid");
        for (std::size_t i = 1; i < rows.size(); ++i)
            require(rows[i].mean_trust < rows[i - 1].mean_trust,
                    "mean trust not strictly decreasing in " + param + " at " +
                        std::to_string(rows[i].value));
    }
}

// 9. The keyword baseline blocks a strict subset of what the rule engine
//    blocks, and the ambiguous-phrasing family is caught by the engine alone.
//    The trust floor is disabled so the comparison isolates the rules.
void check_baseline_gap() {
    const auto lexicon = metrics::load_lexicon(data_path("lexicon/keywords.txt"));
    const auto catalog = sim::load_adversarial_catalog(data_path("adversarial/catalog.json"));
    require(!catalog.empty(), "catalog is empty");

    GatewayConfig gcfg;
    gcfg.enforcement.mode = EnforcementMode::strict;
    gcfg.enforcement.theta_crit = -1e18;
    auto sink = std::make_shared<CollectingSink>();
    Gateway gw(gcfg, sink, std::make_shared<AuditStore>());
    gw.put_policy("essay", slurp(data_path("policies/essay_rules.json")));
    gw.put_policy("trading", slurp(data_path("policies/trading_rules.json")));
    gw.set_text_analyzer("essay", TextAnalyzer{});

    int keyword_hits = 0, engine_hits = 0, ambiguous_entries = 0, seq = 0;
    for (const auto& entry : catalog) {
        ActionSubmission s;
        s.action.agent_id = "probe_" + std::to_string(seq);
        s.action.timestamp = 1000 + seq;
        ++seq;
        if (entry.materialize.has_value()) {
            s.domain = "trading";
            s.action.kind = ActionKind::trade_order;
            s.action.order = entry.materialize;
            s.portfolio.cash = 10000.0;
            s.market.last_close[entry.materialize->asset] = 100.0;
            s.market.rsi[entry.materialize->asset] = 50.0;
        } else {
            s.domain = "essay";
            s.action.kind = ActionKind::text_output;
            s.action.text = entry.payload;
        }
        const bool engine = gw.intercept(s).decision.verdict == Verdict::block;
        const bool keyword = metrics::keyword_blocked(s.action, lexicon);
        if (keyword) {
            ++keyword_hits;
            require(engine, "baseline caught a payload the engine let through");
        }
        if (engine) ++engine_hits;
        if (entry.family == "ambiguous_phrasing") {
            ++ambiguous_entries;
            require(engine, "ambiguous payload not blocked by the engine");
            require(!keyword, "ambiguous payload caught by the baseline");
            Action cover;
            cover.agent_id = "probe_cover";
            cover.kind = ActionKind::text_output;
            cover.text = entry.payload;
            require(!metrics::keyword_blocked(cover, lexicon),
                    "ambiguous cover text caught by the baseline");
        }
    }
    require(ambiguous_entries > 0, "catalog has no ambiguous-phrasing entries");
    require(keyword_hits > 0, "baseline caught nothing; the subset would be trivial");
    require(engine_hits > keyword_hits, "engine did not strictly dominate the baseline");
}

// 10. A 500-action mixed scenario under 8-way concurrent submission: the sink
//     receives exactly the allowed, warned, and human-approved actions, and
//     every per-agent trust chain stays continuous.
void check_gatekeeping() {
    GatewayConfig gcfg;
    gcfg.enforcement.mode = EnforcementMode::adaptive;
    auto sink = std::make_shared<CollectingSink>();
    auto audit = std::make_shared<AuditStore>();
    Gateway gw(gcfg, sink, audit);
    gw.put_policy("trading", slurp(data_path("policies/trading_rules.json")));

    constexpr int kActions = 500;
    std::vector<ActionSubmission> subs(kActions);
    for (int i = 0; i < kActions; ++i) {
        auto& s = subs[i];
        s.domain = "trading";
        s.action.agent_id = "desk_" + std::to_string(i % 4);
        s.action.kind = ActionKind::trade_order;
        s.action.order = TradeOrder{"ACME", OrderSide::buy, 1, 10.0};
        s.action.timestamp = 1000 + i;
        s.action.sequence = i;
        s.portfolio.cash = 10000.0;
        s.market.last_close["ACME"] = 10.0;
        s.market.rsi["ACME"] = 50.0;
        if (i % 5 == 0) s.portfolio.cash = 499.0;               // depleted cash, blocks
        if (i % 5 == 2) s.portfolio.trades_today["ACME"] = 50;  // daily cap, warns then escalates
    }

    std::vector<EnforcementResponse> resp(kActions);
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(8);
    for (int w = 0; w < 8; ++w)
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < kActions; i = next.fetch_add(1))
                resp[i] = gw.intercept(subs[i]);
        });
    for (auto& t : workers) t.join();

    std::multiset<std::pair<std::string, std::int64_t>> expected;
    for (int i = 0; i < kActions; ++i)
        if (resp[i].decision.verdict == Verdict::allow || resp[i].decision.verdict == Verdict::warn)
            expected.emplace(subs[i].action.agent_id, subs[i].action.timestamp);

    const auto pending = gw.list_escalations(TicketStatus::pending);
    require(!pending.empty(), "mixed scenario opened no tickets");
    for (std::size_t k = 0; k < pending.size(); ++k) {
        const bool approve = k % 2 == 0;
        gw.resolve_escalation(pending[k].id, approve, "reviewer");
        if (approve)
            expected.emplace(pending[k].action.agent_id, pending[k].action.timestamp);
    }

    std::multiset<std::pair<std::string, std::int64_t>> delivered;
    for (const auto& [action, decision] : sink->deliveries())
        delivered.emplace(action.agent_id, action.timestamp);
    require(delivered == expected,
            "sink deliveries diverge from the permitted set: delivered " +
                std::to_string(delivered.size()) + ", permitted " +
                std::to_string(expected.size()));

    verify_trust_chain(audit->all());

    std::set<std::pair<std::string, std::int64_t>> distinct;
    for (const auto& r : audit->all()) distinct.emplace(r.agent_id, r.timestamp);
    require(distinct.size() == kActions, "audit does not cover every submission exactly once");
}

}  // namespace

int main() {
    const auto tmp = fs::temp_directory_path() / "gaas_acceptance";
    std::error_code ec;
    fs::remove_all(tmp, ec);
    fs::create_directories(tmp);

    struct Check {
        const char* label;
        std::function<void()> body;
    };
    const std::vector<Check> checks = {
        {"replay fixture blocks 33 of 42 and executes 9", [&] { check_replay(tmp); }},
        {"all injected hard-risk faults blocked across 10k+ adversarial steps",
         [&] { check_coercive_completeness(tmp); }},
        {"trust formulations: monotone, factored, capped, decay boundaries",
         [] { check_trust_formulas(); }},
        {"trust matrix reproduces every tier row and boundary", [] { check_decision_matrix(); }},
        {"verdict fold returns the highest-severity verdict", [] { check_priority_fold(); }},
        {"audit rows round-trip exactly and every scenario keeps its trust chains",
         [&] { check_audit_fidelity(tmp); }},
        {"identical configs reproduce byte-identical artifacts", [&] { check_determinism(tmp); }},
        {"mean final trust falls strictly as each weight rises",
         [&] { check_sweep_monotonicity(tmp); }},
        {"keyword baseline blocks a strict subset of the rule engine",
         [] { check_baseline_gap(); }},
        {"sink receives exactly the permitted and approved actions under concurrency",
         [] { check_gatekeeping(); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        try {
            checks[i].body();
            std::printf("[PASS] %2zu  %s\n", i + 1, checks[i].label);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] %2zu  %s: %s\n", i + 1, checks[i].label, e.what());
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of %zu checks failed\n", failures, checks.size());
    fs::remove_all(tmp, ec);
    return failures == 0 ? 0 : 1;
}
