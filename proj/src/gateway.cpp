#include "gaas/gateway.hpp"

#include <fstream>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"
#include "json.hpp"

namespace gaas {

void CollectingSink::deliver(const Action& action, const Decision& decision) {
    std::lock_guard lk(mu_);
    deliveries_.emplace_back(action, decision);
}

std::vector<std::pair<Action, Decision>> CollectingSink::deliveries() const {
    std::lock_guard lk(mu_);
    return deliveries_;
}

std::size_t CollectingSink::size() const {
    std::lock_guard lk(mu_);
    return deliveries_.size();
}

void FileSink::deliver(const Action& action, const Decision& decision) {
    std::lock_guard lk(mu_);
    nlohmann::json j;
    j["timestamp"] = detail::format_iso8601(action.timestamp);
    j["agent_id"] = action.agent_id;
    j["kind"] = action.kind == ActionKind::trade_order ? "trade_order" : "text_output";
    if (action.order) {
        j["order"] = {{"asset", action.order->asset},
                      {"side", to_string(action.order->side)},
                      {"quantity", action.order->quantity},
                      {"limit_price", action.order->limit_price}};
    } else {
        j["text"] = action.text;
    }
    j["verdict"] = to_string(decision.verdict);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw StorageError("cannot append to sink file: " + path_);
    out << j.dump() << '\n';
}

Gateway::Gateway(GatewayConfig cfg, std::shared_ptr<EnvironmentSink> sink,
                 std::shared_ptr<AuditStore> audit)
    : cfg_(std::move(cfg)), sink_(std::move(sink)), audit_(std::move(audit)) {
    if (!sink_) throw ConfigError("gateway needs an environment sink");
    if (!audit_) throw ConfigError("gateway needs an audit store");
}

int Gateway::put_policy(const std::string& domain, const std::string& rule_document_json) {
    RuleSet rs = parse_rule_set(rule_document_json);
    if (rs.domain.empty()) rs.domain = domain;
    std::lock_guard lk(domains_mu_);
    auto& slot = domains_[domain];
    if (!slot) slot = std::make_shared<DomainRuntime>();
    const int version = std::max(rs.version, slot->last_version + 1);
    rs.version = version;
    auto compiled = compile_rule_set(rs);  // throws CompileError on findings
    auto next = std::make_shared<DomainRuntime>(*slot);
    next->rules = std::move(compiled);
    next->last_version = version;
    slot = std::move(next);  // readers holding the old snapshot are unaffected
    return version;
}

void Gateway::set_text_analyzer(const std::string& domain, TextAnalyzer analyzer) {
    std::lock_guard lk(domains_mu_);
    auto& slot = domains_[domain];
    if (!slot) slot = std::make_shared<DomainRuntime>();
    auto next = std::make_shared<DomainRuntime>(*slot);
    next->analyzer = std::make_shared<const TextAnalyzer>(std::move(analyzer));
    slot = std::move(next);
}

std::shared_ptr<Gateway::DomainRuntime> Gateway::domain_snapshot(const std::string& domain) const {
    std::lock_guard lk(domains_mu_);
    const auto it = domains_.find(domain);
    if (it == domains_.end()) throw UnknownDomain("no such domain '" + domain + "'");
    if (!it->second->rules) throw Unavailable("domain '" + domain + "' has no active policy");
    return it->second;
}

std::shared_ptr<std::mutex> Gateway::agent_mutex(const std::string& agent_id) {
    std::lock_guard lk(trust_mu_);
    auto& slot = agent_mu_[agent_id];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

EnforcementResponse Gateway::intercept(const ActionSubmission& s) {
    if (s.action.agent_id.empty()) throw ValidationFailed("agent_id must be non-empty");
    if (s.action.kind == ActionKind::trade_order) {
        if (!s.action.order) throw ValidationFailed("trade_order submission carries no order");
        if (s.action.order->quantity <= 0) throw ValidationFailed("order quantity must be > 0");
        if (s.action.order->limit_price <= 0.0)
            throw ValidationFailed("order limit price must be > 0");
    }
    const auto runtime = domain_snapshot(s.domain);

    if (s.idempotency_key) {
        std::lock_guard lk(idem_mu_);
        const auto it = idempotent_.find(*s.idempotency_key);
        if (it != idempotent_.end()) return it->second;
    }

    const auto agent_lock = agent_mutex(s.action.agent_id);
    std::lock_guard agent_lk(*agent_lock);

    EvaluationContext ctx;
    ctx.portfolio = s.portfolio;
    ctx.market = s.market;
    ctx.text = runtime->analyzer.get();

    std::vector<Violation> violations;
    try {
        violations = check_action(s.action, ctx, *runtime->rules);
    } catch (const ContextMissing& e) {
        throw ValidationFailed(std::string("submission context incomplete: ") + e.what());
    }

    TrustState before;
    {
        std::lock_guard lk(trust_mu_);
        const auto it = trust_.find(s.action.agent_id);
        before = it != trust_.end() ? it->second : fresh_trust_state(s.action.agent_id, cfg_.trust);
    }

    EnforcementOutcome outcome;
    if (cfg_.enforcement_enabled) {
        outcome = decide(s.action, violations, before, cfg_.enforcement, cfg_.trust);
    } else {
        // shadow regime: violations and trust are recorded, nothing is stopped
        outcome.trust = record_action(before, violations, cfg_.trust);
        outcome.decision.verdict = Verdict::allow;
        outcome.decision.trust_before = before.current_tf;
        outcome.decision.trust_after = outcome.trust.current_tf;
        outcome.decision.reason = DecisionReason::clean;
        for (const auto& v : violations) {
            outcome.decision.triggering.emplace_back(v.rule_id, Verdict::allow);
            outcome.decision.reason = v.rule_type == RuleType::coercive
                                          ? DecisionReason::coercive_rule
                                          : outcome.decision.reason;
        }
    }

    audit_->append(records_for_decision(s.action, violations, outcome.decision));
    {
        std::lock_guard lk(trust_mu_);
        trust_[s.action.agent_id] = outcome.trust;
    }

    EnforcementResponse resp;
    resp.decision = outcome.decision;
    resp.policy_version = runtime->rules->version;

    const bool deliver = outcome.decision.verdict == Verdict::allow ||
                         outcome.decision.verdict == Verdict::warn;
    if (deliver) sink_->deliver(s.action, outcome.decision);

    const bool ticket = outcome.decision.verdict == Verdict::escalate ||
                        (outcome.decision.verdict == Verdict::block &&
                         outcome.decision.escalation_flag);
    if (ticket) resp.ticket_id = escalations_.push(s.action, outcome.decision).id;

    if (s.idempotency_key) {
        std::lock_guard lk(idem_mu_);
        idempotent_.emplace(*s.idempotency_key, resp);
    }
    return resp;
}

TrustState Gateway::get_trust(const std::string& agent_id) const {
    std::lock_guard lk(trust_mu_);
    const auto it = trust_.find(agent_id);
    return it != trust_.end() ? it->second : fresh_trust_state(agent_id, cfg_.trust);
}

std::vector<EscalationTicket> Gateway::list_escalations(std::optional<TicketStatus> status) const {
    return escalations_.list(status);
}

EnforcementResponse Gateway::resolve_escalation(const std::string& ticket_id, bool approve,
                                                const std::string& reviewer,
                                                std::optional<std::int64_t> resolved_at) {
    const EscalationTicket t = escalations_.resolve(ticket_id, approve, reviewer);

    const auto agent_lock = agent_mutex(t.action.agent_id);
    std::lock_guard agent_lk(*agent_lock);

    const TrustState current = get_trust(t.action.agent_id);
    AuditRecord row;
    row.timestamp = resolved_at.value_or(t.action.timestamp);
    row.agent_id = t.action.agent_id;
    row.trust_before = current.current_tf;  // resolution does not re-score trust
    row.trust_after = current.current_tf;
    row.decision = approve ? Verdict::allow : Verdict::block;
    audit_->append(row);

    Decision d;
    d.verdict = row.decision;
    d.trust_before = row.trust_before;
    d.trust_after = row.trust_after;
    d.reason = approve ? DecisionReason::human_override : DecisionReason::human_denied;
    if (approve) sink_->deliver(t.action, d);

    EnforcementResponse resp;
    resp.decision = d;
    resp.ticket_id = t.id;
    return resp;
}

int Gateway::active_policy_version(const std::string& domain) const {
    std::lock_guard lk(domains_mu_);
    const auto it = domains_.find(domain);
    return it == domains_.end() ? 0 : it->second->last_version;
}

}  // namespace gaas
