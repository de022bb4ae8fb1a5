#pragma once

// The enforcement point between agents and their environment. Every proposed
// action is intercepted, matched, decided, audited, and only then forwarded.
// The gateway serializes per-agent processing so trust chains stay continuous
// under concurrent submission.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gaas/audit.hpp"
#include "gaas/enforcement.hpp"
#include "gaas/matcher.hpp"
#include "gaas/rules.hpp"
#include "gaas/text_analysis.hpp"
#include "gaas/trust.hpp"

namespace gaas {

/** Where allowed and warned actions are delivered. */
struct EnvironmentSink {
    virtual ~EnvironmentSink() = default;
    virtual void deliver(const Action& action, const Decision& decision) = 0;
};

/** Test and sim sink: keeps deliveries in memory. */
class CollectingSink : public EnvironmentSink {
public:
    void deliver(const Action& action, const Decision& decision) override;
    std::vector<std::pair<Action, Decision>> deliveries() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<std::pair<Action, Decision>> deliveries_;
};

/** Appends one JSON line per delivered action. */
class FileSink : public EnvironmentSink {
public:
    explicit FileSink(std::string path) : path_(std::move(path)) {}
    void deliver(const Action& action, const Decision& decision) override;

private:
    std::mutex mu_;
    std::string path_;
};

struct ActionSubmission {
    std::string domain;
    Action action;
    std::optional<std::string> idempotency_key;
    PortfolioState portfolio;  // trading context, supplied by the submitter
    MarketSnapshot market;
};

struct EnforcementResponse {
    Decision decision;
    std::optional<std::string> ticket_id;  // present when a ticket was opened
    int policy_version{0};
};

struct GatewayConfig {
    TrustConfig trust;
    EnforcementConfig enforcement;
    bool enforcement_enabled{true};  // false: shadow regime, everything allowed
                                     // but violations and trust still recorded
};

class Gateway {
public:
    Gateway(GatewayConfig cfg, std::shared_ptr<EnvironmentSink> sink,
            std::shared_ptr<AuditStore> audit);

    /// Parses, validates, compiles, and atomically swaps the domain's active
    /// rule set. Returns the activation version (strictly increasing per
    /// domain). Throws ParseError / SchemaError / CompileError on bad input.
    int put_policy(const std::string& domain, const std::string& rule_document_json);

    /// Installs the text analyzer (marker config + reference corpus) used for
    /// the domain's predicate rules.
    void set_text_analyzer(const std::string& domain, TextAnalyzer analyzer);

    /// Full enforcement pass for one submission. Repeated idempotency keys
    /// return the first response without re-evaluating or re-logging.
    EnforcementResponse intercept(const ActionSubmission& submission);

    /// current trust snapshot; unknown agents get the fresh-state summary
    TrustState get_trust(const std::string& agent_id) const;

    std::vector<EscalationTicket> list_escalations(
        std::optional<TicketStatus> status = std::nullopt) const;

    /// Approve forwards the held action to the sink and logs a human_override
    /// allow row; deny logs a block row. Trust is not re-scored.
    EnforcementResponse resolve_escalation(const std::string& ticket_id, bool approve,
                                           const std::string& reviewer,
                                           std::optional<std::int64_t> resolved_at = std::nullopt);

    int active_policy_version(const std::string& domain) const;

    AuditStore& audit() { return *audit_; }
    const AuditStore& audit() const { return *audit_; }
    const GatewayConfig& config() const { return cfg_; }

private:
    struct DomainRuntime {
        CompiledRuleSetPtr rules;
        std::shared_ptr<const TextAnalyzer> analyzer;
        int last_version{0};
    };

    std::shared_ptr<DomainRuntime> domain_snapshot(const std::string& domain) const;
    std::shared_ptr<std::mutex> agent_mutex(const std::string& agent_id);

    GatewayConfig cfg_;
    std::shared_ptr<EnvironmentSink> sink_;
    std::shared_ptr<AuditStore> audit_;
    EscalationQueue escalations_;

    mutable std::mutex domains_mu_;
    std::map<std::string, std::shared_ptr<DomainRuntime>> domains_;

    mutable std::mutex trust_mu_;
    std::map<std::string, TrustState> trust_;
    std::map<std::string, std::shared_ptr<std::mutex>> agent_mu_;

    std::mutex idem_mu_;
    std::map<std::string, EnforcementResponse> idempotent_;
};

}  // namespace gaas
