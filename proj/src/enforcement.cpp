#include "gaas/enforcement.hpp"

#include <algorithm>
#include <cstdio>

#include "gaas/errors.hpp"

namespace gaas {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::allow: return "allow";
        case Verdict::warn: return "warn";
        case Verdict::escalate: return "escalate";
        case Verdict::block: return "block";
    }
    return "?";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
    if (s == "allow") return Verdict::allow;
    if (s == "warn") return Verdict::warn;
    if (s == "escalate") return Verdict::escalate;
    if (s == "block") return Verdict::block;
    return std::nullopt;
}

const char* to_string(EnforcementMode m) {
    switch (m) {
        case EnforcementMode::strict: return "strict";
        case EnforcementMode::adaptive: return "adaptive";
        case EnforcementMode::decision_matrix: return "decision_matrix";
    }
    return "?";
}

std::optional<EnforcementMode> mode_from_string(const std::string& s) {
    if (s == "strict") return EnforcementMode::strict;
    if (s == "adaptive") return EnforcementMode::adaptive;
    if (s == "decision_matrix") return EnforcementMode::decision_matrix;
    return std::nullopt;
}

const char* to_string(DecisionReason r) {
    switch (r) {
        case DecisionReason::clean: return "clean";
        case DecisionReason::coercive_rule: return "coercive_rule";
        case DecisionReason::normative_rule: return "normative_rule";
        case DecisionReason::mimetic_rule: return "mimetic_rule";
        case DecisionReason::adaptive_escalation: return "adaptive_escalation";
        case DecisionReason::matrix_tier: return "matrix_tier";
        case DecisionReason::global_trust_floor: return "global_trust_floor";
        case DecisionReason::human_override: return "human_override";
        case DecisionReason::human_denied: return "human_denied";
    }
    return "?";
}

const char* to_string(TicketStatus s) {
    switch (s) {
        case TicketStatus::pending: return "pending";
        case TicketStatus::approved: return "approved";
        case TicketStatus::denied: return "denied";
    }
    return "?";
}

Verdict resolve_priority(const std::vector<Verdict>& verdicts) {
    Verdict out = Verdict::allow;
    for (const auto v : verdicts)
        if (static_cast<int>(v) > static_cast<int>(out)) out = v;
    return out;
}

Verdict adaptive_verdict(const Violation& v, const TrustState& trust,
                         const EnforcementConfig& cfg) {
    const auto it = trust.per_rule_counts.find(v.rule_id);
    const std::int64_t prior = it == trust.per_rule_counts.end() ? 0 : it->second;
    if (trust.current_tf > cfg.theta && prior == 0) return Verdict::warn;  // first offense
    if (prior >= cfg.tau || trust.current_tf <= cfg.theta) return Verdict::escalate;
    return Verdict::warn;
}

Verdict matrix_verdict(const Violation& v, double tf, const EnforcementConfig& cfg,
                       bool& escalation_flag) {
    if (tf <= cfg.theta_block) {  // Low tier, boundary inclusive
        escalation_flag = true;
        return Verdict::block;
    }
    if (tf <= cfg.theta_warn) {  // Medium tier, boundary inclusive
        return v.rule_type == RuleType::coercive ? Verdict::block : Verdict::warn;
    }
    // High tier: notification-only for normative, conformance note for mimetic
    return v.rule_type == RuleType::coercive ? Verdict::warn : Verdict::allow;
}

namespace {

DecisionReason reason_for(RuleType t) {
    switch (t) {
        case RuleType::coercive: return DecisionReason::coercive_rule;
        case RuleType::normative: return DecisionReason::normative_rule;
        case RuleType::mimetic: return DecisionReason::mimetic_rule;
    }
    return DecisionReason::clean;
}

}  // namespace

EnforcementOutcome decide(const Action& action, const std::vector<Violation>& violations,
                          const TrustState& trust, const EnforcementConfig& cfg,
                          const TrustConfig& trust_cfg) {
    (void)action;
    Decision d;
    d.trust_before = trust.current_tf;

    std::vector<Verdict> folded;
    DecisionReason dominant = DecisionReason::clean;
    Verdict dominant_v = Verdict::allow;
    for (const auto& v : violations) {
        Verdict pv = Verdict::allow;
        switch (cfg.mode) {
            case EnforcementMode::strict:
                pv = v.rule_type == RuleType::coercive ? Verdict::block : Verdict::warn;
                break;
            case EnforcementMode::adaptive:
                pv = v.rule_type == RuleType::coercive ? Verdict::block
                                                       : adaptive_verdict(v, trust, cfg);
                break;
            case EnforcementMode::decision_matrix:
                pv = matrix_verdict(v, trust.current_tf, cfg, d.escalation_flag);
                break;
        }
        d.triggering.emplace_back(v.rule_id, pv);
        folded.push_back(pv);
        if (static_cast<int>(pv) >= static_cast<int>(dominant_v)) {
            dominant_v = pv;
            if (cfg.mode == EnforcementMode::decision_matrix)
                dominant = DecisionReason::matrix_tier;
            else if (cfg.mode == EnforcementMode::adaptive && pv == Verdict::escalate)
                dominant = DecisionReason::adaptive_escalation;
            else
                dominant = reason_for(v.rule_type);
        }
    }
    d.verdict = resolve_priority(folded);
    d.reason = violations.empty() ? DecisionReason::clean : dominant;

    EnforcementOutcome out;
    out.trust = record_action(trust, violations, trust_cfg);
    d.trust_after = out.trust.current_tf;
    if (out.trust.current_tf < cfg.theta_crit) {
        d.verdict = Verdict::block;
        d.reason = DecisionReason::global_trust_floor;
        d.escalation_flag = true;
    }
    out.decision = std::move(d);
    return out;
}

EscalationTicket EscalationQueue::push(const Action& action, const Decision& decision) {
    std::lock_guard lk(mu_);
    EscalationTicket t;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "E-%04zu", tickets_.size() + 1);
    t.id = buf;
    t.action = action;
    t.decision = decision;
    tickets_.push_back(t);
    return t;
}

std::vector<EscalationTicket> EscalationQueue::list(std::optional<TicketStatus> status) const {
    std::lock_guard lk(mu_);
    std::vector<EscalationTicket> out;
    for (const auto& t : tickets_)
        if (!status || t.status == *status) out.push_back(t);
    return out;
}

EscalationTicket EscalationQueue::resolve(const std::string& ticket_id, bool approve,
                                          const std::string& reviewer) {
    std::lock_guard lk(mu_);
    for (auto& t : tickets_) {
        if (t.id != ticket_id) continue;
        if (t.status != TicketStatus::pending)
            throw AlreadyResolved("ticket " + ticket_id + " already " + to_string(t.status));
        t.status = approve ? TicketStatus::approved : TicketStatus::denied;
        t.reviewer = reviewer;
        return t;
    }
    throw UnknownTicket("no ticket " + ticket_id);
}

}  // namespace gaas
