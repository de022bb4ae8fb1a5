#pragma once

// Per-agent trust scoring. Two formulations share one weight vector:
//
//   main_text:   TF = a(1 - Vc/N) + b(1 - Vn/N) + g(1 - Vm/N) - d*S
//   normalized:  TF = 1 - (a*Vc + b*Vn + g*Vm + d*S) / (N + eps)
//
// with S = sum over severity events of lambda^(N - t) * s_t. Weights pair
// canonically: alpha with coercive, beta with normative, gamma with mimetic,
// delta with the severity sum. The normalized form is the default and is
// defined at N = 0 (empty history scores 1).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gaas/matcher.hpp"

namespace gaas {

struct TrustWeights {
    double alpha{0.5};  // coercive
    double beta{0.5};   // normative
    double gamma{0.5};  // mimetic
    double delta{0.5};  // severity sum
};

enum class TrustFormulation { main_text, normalized };

struct TrustConfig {
    TrustWeights weights;
    double lambda{0.9};   // recency decay, (0, 1]
    double epsilon{0.001};
    TrustFormulation formulation{TrustFormulation::normalized};
};

struct SeverityEvent {
    std::int64_t t{0};  // 1-based action index at which the violation occurred
    double severity{0.0};
};

struct TrustState {
    std::string agent_id;
    std::int64_t n_actions{0};  // N
    std::int64_t v_coercive{0};
    std::int64_t v_normative{0};
    std::int64_t v_mimetic{0};
    std::vector<SeverityEvent> severity_events;  // exact history for recomputation
    std::map<std::string, std::int64_t> per_rule_counts;
    double current_tf{1.0};
};

/// empty-history trust value for the formulation (1 for normalized,
/// alpha+beta+gamma for main_text)
TrustState fresh_trust_state(const std::string& agent_id, const TrustConfig& cfg);

/// sum of lambda^(N - t) * s_t; throws IndexBeyondHorizon if any t > N
double severity_sum(const std::vector<SeverityEvent>& events, std::int64_t n, double lambda);

/// throws EmptyHistory at N = 0
double trust_factor_main(const TrustState& s, const TrustConfig& cfg);

double trust_factor_normalized(const TrustState& s, const TrustConfig& cfg);

/// dispatches on cfg.formulation
double trust_factor(const TrustState& s, const TrustConfig& cfg);

/// Pure fold: N increments once per action, counters and severity events grow
/// by the action's violations, current_tf is recomputed.
TrustState record_action(const TrustState& s, const std::vector<Violation>& violations,
                         const TrustConfig& cfg);

}  // namespace gaas
