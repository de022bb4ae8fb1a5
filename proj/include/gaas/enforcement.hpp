#pragma once

// Decision layer: folds per-rule verdicts into one action verdict under the
// configured mode, updates trust, and applies the global trust floor. Warned
// actions still execute; blocked and escalated ones do not.

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaas/matcher.hpp"
#include "gaas/trust.hpp"

namespace gaas {

enum class Verdict { allow, warn, escalate, block };  // ascending severity

const char* to_string(Verdict v);
std::optional<Verdict> verdict_from_string(const std::string& s);

enum class EnforcementMode { strict, adaptive, decision_matrix };

const char* to_string(EnforcementMode m);
std::optional<EnforcementMode> mode_from_string(const std::string& s);

struct EnforcementConfig {
    EnforcementMode mode{EnforcementMode::strict};
    double theta{0.5};        // adaptive trust threshold
    int tau{2};               // adaptive repeat-offense threshold
    double theta_warn{0.7};   // decision-matrix tier boundary (High above)
    double theta_block{0.4};  // decision-matrix tier boundary (Low at or below)
    double theta_crit{0.2};   // global trust floor, checked post-update
};

enum class DecisionReason {
    clean,
    coercive_rule,
    normative_rule,
    mimetic_rule,
    adaptive_escalation,
    matrix_tier,
    global_trust_floor,
    human_override,
    human_denied,
};

const char* to_string(DecisionReason r);

struct Decision {
    Verdict verdict{Verdict::allow};
    std::vector<std::pair<std::string, Verdict>> triggering;  // rule id -> per-rule verdict
    double trust_before{1.0};
    double trust_after{1.0};
    DecisionReason reason{DecisionReason::clean};
    bool escalation_flag{false};  // opens a ticket even when verdict is block
};

/// maximum by severity: block > escalate > warn > allow; empty folds to allow
Verdict resolve_priority(const std::vector<Verdict>& verdicts);

/// Non-coercive verdicts under adaptive mode: first offense of a rule while
/// trusted warns; repeat offenses at or past tau, or low trust, escalate.
Verdict adaptive_verdict(const Violation& v, const TrustState& trust,
                         const EnforcementConfig& cfg);

/// Trust-tier matrix. Boundaries: tf == theta_warn is Medium, tf == theta_block
/// is Low. Low-tier blocks carry the escalation flag.
Verdict matrix_verdict(const Violation& v, double tf, const EnforcementConfig& cfg,
                       bool& escalation_flag);

struct EnforcementOutcome {
    Decision decision;
    TrustState trust;  // post-action state the caller commits
};

/// Pure: per-rule verdicts from the pre-action trust state, priority fold,
/// trust update, then the global floor (post-update tf < theta_crit blocks
/// with reason global_trust_floor and opens a ticket).
EnforcementOutcome decide(const Action& action, const std::vector<Violation>& violations,
                          const TrustState& trust, const EnforcementConfig& cfg,
                          const TrustConfig& trust_cfg);

// ── escalation queue ──

enum class TicketStatus { pending, approved, denied };

const char* to_string(TicketStatus s);

struct EscalationTicket {
    std::string id;  // "E-0001"
    TicketStatus status{TicketStatus::pending};
    Action action;
    Decision decision;
    std::string reviewer;
};

/** Append-only, thread-safe ticket store. */
class EscalationQueue {
public:
    EscalationTicket push(const Action& action, const Decision& decision);
    std::vector<EscalationTicket> list(std::optional<TicketStatus> status = std::nullopt) const;
    /// flips a pending ticket; UnknownTicket / AlreadyResolved otherwise
    EscalationTicket resolve(const std::string& ticket_id, bool approve,
                             const std::string& reviewer);

private:
    mutable std::mutex mu_;
    std::vector<EscalationTicket> tickets_;
};

}  // namespace gaas
