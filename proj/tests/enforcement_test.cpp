#include "doctest.h"
#include "gaas/enforcement.hpp"
#include "gaas/errors.hpp"

using namespace gaas;

namespace {

Violation viol(RuleType type, double sev, const std::string& id) {
    return Violation{id, type, sev, "test"};
}

Action text_action(const std::string& agent, std::int64_t ts = 1000) {
    Action a;
    a.agent_id = agent;
    a.kind = ActionKind::text_output;
    a.text = "t";
    a.timestamp = ts;
    return a;
}

EnforcementConfig defaults() { return {}; }

TrustConfig trust_defaults() { return {}; }

TrustState state_with_tf(double target) {
    // one normative violation whose severity is solved so that the normalized
    // form lands exactly on target
    TrustConfig cfg = trust_defaults();
    TrustState s = fresh_trust_state("x", cfg);
    s.n_actions = 1;
    s.v_normative = 1;
    const double sev =
        ((1.0 - target) * (1.0 + cfg.epsilon) - cfg.weights.beta) / cfg.weights.delta;
    s.severity_events = {{1, sev}};
    s.current_tf = trust_factor(s, cfg);
    return s;
}

}  // namespace

TEST_CASE("priority fold takes the most severe verdict") {
    CHECK(resolve_priority({}) == Verdict::allow);
    CHECK(resolve_priority({Verdict::warn, Verdict::allow}) == Verdict::warn);
    CHECK(resolve_priority({Verdict::warn, Verdict::escalate}) == Verdict::escalate);
    CHECK(resolve_priority({Verdict::escalate, Verdict::block, Verdict::warn}) ==
          Verdict::block);
}

TEST_CASE("strict mode blocks coercive and warns the rest") {
    EnforcementConfig cfg = defaults();
    cfg.mode = EnforcementMode::strict;
    cfg.theta_crit = -1e18;  // keep the floor out of these cases
    TrustConfig tc = trust_defaults();
    TrustState fresh = fresh_trust_state("a", tc);

    auto out = decide(text_action("a"), {viol(RuleType::coercive, 0.9, "R1")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::block);
    CHECK(out.decision.reason == DecisionReason::coercive_rule);

    out = decide(text_action("a"), {viol(RuleType::normative, 0.6, "R2")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::warn);

    out = decide(text_action("a"), {viol(RuleType::mimetic, 0.3, "R3")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::warn);

    out = decide(text_action("a"), {}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::allow);
    CHECK(out.decision.reason == DecisionReason::clean);
    CHECK(out.trust.n_actions == 1);
}

TEST_CASE("adaptive mode graduates by history and trust") {
    EnforcementConfig cfg = defaults();
    cfg.mode = EnforcementMode::adaptive;
    cfg.theta_crit = -1e18;
    TrustConfig tc = trust_defaults();

    // coercive blocks regardless of trust
    TrustState fresh = fresh_trust_state("a", tc);
    auto out = decide(text_action("a"), {viol(RuleType::coercive, 0.9, "R1")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::block);

    // first offense while trusted warns
    out = decide(text_action("a"), {viol(RuleType::mimetic, 0.3, "R3")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::warn);

    // second offense while trusted still warns; tau prior offenses escalate
    TrustState second = fresh;
    second.per_rule_counts["R3"] = 1;
    second.n_actions = 1;
    out = decide(text_action("a"), {viol(RuleType::mimetic, 0.3, "R3")}, second, cfg, tc);
    CHECK(out.decision.verdict == Verdict::warn);

    TrustState third = fresh;
    third.per_rule_counts["R3"] = 2;  // tau reached
    third.n_actions = 2;
    out = decide(text_action("a"), {viol(RuleType::mimetic, 0.3, "R3")}, third, cfg, tc);
    CHECK(out.decision.verdict == Verdict::escalate);
    CHECK(out.decision.reason == DecisionReason::adaptive_escalation);

    // a different rule id is still a first offense
    out = decide(text_action("a"), {viol(RuleType::mimetic, 0.3, "R4")}, third, cfg, tc);
    CHECK(out.decision.verdict == Verdict::warn);

    // low trust escalates even a first offense; theta itself is not low
    TrustState low = state_with_tf(0.49);
    out = decide(text_action("a"), {viol(RuleType::normative, 0.5, "R9")}, low, cfg, tc);
    CHECK(out.decision.verdict == Verdict::escalate);

    TrustState at_theta = state_with_tf(0.5);
    at_theta.current_tf = cfg.theta;  // sit exactly on the boundary
    out = decide(text_action("a"), {viol(RuleType::normative, 0.5, "R9")}, at_theta, cfg, tc);
    CHECK(out.decision.verdict == Verdict::escalate);  // tf <= theta escalates
}

TEST_CASE("decision matrix reproduces every tier row") {
    EnforcementConfig cfg = defaults();  // theta_warn 0.7, theta_block 0.4
    bool flag = false;

    auto v = [&](RuleType t, double tf) {
        flag = false;
        return matrix_verdict(viol(t, 0.5, "R"), tf, cfg, flag);
    };

    // High tier: tf > theta_warn
    CHECK(v(RuleType::normative, 0.9) == Verdict::allow);
    CHECK(v(RuleType::mimetic, 0.9) == Verdict::allow);
    CHECK(v(RuleType::coercive, 0.9) == Verdict::warn);
    CHECK_FALSE(flag);

    // Medium tier: theta_block < tf <= theta_warn, boundary included
    CHECK(v(RuleType::normative, 0.7) == Verdict::warn);
    CHECK(v(RuleType::mimetic, 0.55) == Verdict::warn);
    CHECK(v(RuleType::coercive, 0.7) == Verdict::block);
    CHECK_FALSE(flag);

    // Low tier: tf <= theta_block, boundary included, escalation flagged
    CHECK(v(RuleType::normative, 0.4) == Verdict::block);
    CHECK(flag);
    CHECK(v(RuleType::mimetic, 0.1) == Verdict::block);
    CHECK(flag);
    CHECK(v(RuleType::coercive, -2.0) == Verdict::block);
    CHECK(flag);
}

TEST_CASE("decide folds multiple violations by priority") {
    EnforcementConfig cfg = defaults();
    cfg.mode = EnforcementMode::adaptive;
    cfg.theta_crit = -1e18;
    TrustConfig tc = trust_defaults();
    TrustState fresh = fresh_trust_state("a", tc);

    auto out = decide(text_action("a"),
                      {viol(RuleType::mimetic, 0.3, "R3"), viol(RuleType::coercive, 0.9, "R1")},
                      fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::block);
    REQUIRE(out.decision.triggering.size() == 2);
    CHECK(out.decision.triggering[0].first == "R3");
    CHECK(out.decision.triggering[0].second == Verdict::warn);
    CHECK(out.decision.triggering[1].first == "R1");
    CHECK(out.decision.triggering[1].second == Verdict::block);
    CHECK(out.trust.n_actions == 1);
    CHECK(out.trust.v_coercive == 1);
    CHECK(out.trust.v_mimetic == 1);
}

TEST_CASE("global floor blocks after the update and opens a ticket") {
    EnforcementConfig cfg = defaults();
    cfg.mode = EnforcementMode::strict;  // would otherwise warn
    TrustConfig tc = trust_defaults();
    TrustState fresh = fresh_trust_state("a", tc);

    // one normative 1.0 violation: tf = 1 - (0.5 + 0.5)/1.001 < 0.2
    auto out = decide(text_action("a"), {viol(RuleType::normative, 1.0, "R2")}, fresh, cfg, tc);
    CHECK(out.decision.verdict == Verdict::block);
    CHECK(out.decision.reason == DecisionReason::global_trust_floor);
    CHECK(out.decision.escalation_flag);
    CHECK(out.decision.trust_before == 1.0);
    CHECK(out.decision.trust_after < cfg.theta_crit);

    // exactly at the floor is not below it
    cfg.theta_crit = out.decision.trust_after;
    auto at = decide(text_action("a"), {viol(RuleType::normative, 1.0, "R2")}, fresh, cfg, tc);
    CHECK(at.decision.verdict == Verdict::warn);
}

TEST_CASE("escalation queue lifecycle") {
    EscalationQueue q;
    Decision d;
    d.verdict = Verdict::escalate;

    auto t1 = q.push(text_action("a", 10), d);
    auto t2 = q.push(text_action("b", 11), d);
    CHECK(t1.id == "E-0001");
    CHECK(t2.id == "E-0002");
    CHECK(q.list().size() == 2);
    CHECK(q.list(TicketStatus::pending).size() == 2);
    CHECK(q.list(TicketStatus::approved).empty());

    auto done = q.resolve("E-0001", true, "ops");
    CHECK(done.status == TicketStatus::approved);
    CHECK(done.reviewer == "ops");
    CHECK(q.list(TicketStatus::pending).size() == 1);

    auto denied = q.resolve("E-0002", false, "ops");
    CHECK(denied.status == TicketStatus::denied);

    CHECK_THROWS_AS(q.resolve("E-0001", true, "ops"), AlreadyResolved);
    CHECK_THROWS_AS(q.resolve("E-9999", true, "ops"), UnknownTicket);
}
