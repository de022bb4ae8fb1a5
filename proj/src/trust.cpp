#include "gaas/trust.hpp"

#include <cmath>

#include "gaas/errors.hpp"

namespace gaas {

TrustState fresh_trust_state(const std::string& agent_id, const TrustConfig& cfg) {
    TrustState s;
    s.agent_id = agent_id;
    s.current_tf = cfg.formulation == TrustFormulation::normalized
                       ? 1.0
                       : cfg.weights.alpha + cfg.weights.beta + cfg.weights.gamma;
    return s;
}

double severity_sum(const std::vector<SeverityEvent>& events, std::int64_t n, double lambda) {
    double sum = 0.0;
    for (const auto& e : events) {
        if (e.t > n)
            throw IndexBeyondHorizon("severity event at t=" + std::to_string(e.t) +
                                     " beyond N=" + std::to_string(n));
        sum += std::pow(lambda, static_cast<double>(n - e.t)) * e.severity;
    }
    return sum;
}

double trust_factor_main(const TrustState& s, const TrustConfig& cfg) {
    if (s.n_actions == 0) throw EmptyHistory("main-text trust factor undefined at N=0");
    const double n = static_cast<double>(s.n_actions);
    const auto& w = cfg.weights;
    const double ss = severity_sum(s.severity_events, s.n_actions, cfg.lambda);
    return w.alpha * (1.0 - static_cast<double>(s.v_coercive) / n) +
           w.beta * (1.0 - static_cast<double>(s.v_normative) / n) +
           w.gamma * (1.0 - static_cast<double>(s.v_mimetic) / n) - w.delta * ss;
}

double trust_factor_normalized(const TrustState& s, const TrustConfig& cfg) {
    const auto& w = cfg.weights;
    const double ss = severity_sum(s.severity_events, s.n_actions, cfg.lambda);
    const double penalty = w.alpha * static_cast<double>(s.v_coercive) +
                           w.beta * static_cast<double>(s.v_normative) +
                           w.gamma * static_cast<double>(s.v_mimetic) + w.delta * ss;
    return 1.0 - penalty / (static_cast<double>(s.n_actions) + cfg.epsilon);
}

double trust_factor(const TrustState& s, const TrustConfig& cfg) {
    return cfg.formulation == TrustFormulation::main_text ? trust_factor_main(s, cfg)
                                                          : trust_factor_normalized(s, cfg);
}

TrustState record_action(const TrustState& s, const std::vector<Violation>& violations,
                         const TrustConfig& cfg) {
    TrustState next = s;
    next.n_actions = s.n_actions + 1;
    for (const auto& v : violations) {
        switch (v.rule_type) {
            case RuleType::coercive: ++next.v_coercive; break;
            case RuleType::normative: ++next.v_normative; break;
            case RuleType::mimetic: ++next.v_mimetic; break;
        }
        next.severity_events.push_back({next.n_actions, v.severity});
        ++next.per_rule_counts[v.rule_id];
    }
    next.current_tf = trust_factor(next, cfg);
    return next;
}

}  // namespace gaas
