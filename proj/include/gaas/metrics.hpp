#pragma once

// Post-run analysis: detection quality against the injection ledger, weight
// sensitivity sweeps, trust trajectories, violation heatmaps, and the keyword
// filter that serves as the reference baseline. Everything here reads
// immutable run artifacts.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaas/audit.hpp"
#include "gaas/config.hpp"
#include "gaas/matcher.hpp"
#include "gaas/sim/faults.hpp"

namespace gaas::metrics {

struct ConfusionCounts {
    int tp{0}, fp{0}, fn{0}, tn{0};
    int total() const { return tp + fp + fn + tn; }
};

/// which ledger rows count as harmful ground truth
enum class HarmScope {
    all_injected,       // every materialized fault
    coercive_injected,  // hard-risk faults only
};

/// Joins audit rows against the ledger by (agent, timestamp). One distinct
/// action per (agent, timestamp) group; blocked means the final verdict was
/// block, so warns and escalations count as not blocked. Rows with ledger
/// status other than "injected" (padding, inapplicable) are benign.
/// Throws RunMismatch when audit_run_id is given and a ledger row disagrees.
ConfusionCounts confusion(const std::vector<AuditRecord>& audit,
                          const std::vector<sim::LedgerEntry>& ledger,
                          HarmScope scope = HarmScope::all_injected,
                          const std::string& audit_run_id = "");

/// precision/recall/f1; a metric with a zero denominator is absent, not 0
struct Prf {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

Prf derive_prf(const ConfusionCounts& c);

// ── keyword baseline ──

/// one lowercase term per line; '#' comments and blank lines skipped
std::vector<std::string> load_lexicon(const std::string& path);

/// Case-insensitive match: whole-word for single tokens, substring for
/// phrases. Structured trade orders always pass; a term list cannot see
/// numeric risk, which is the gap the rule engine closes.
bool keyword_blocked(const Action& action, const std::vector<std::string>& lexicon);

// ── sensitivity sweep ──

struct SweepSpec {
    std::string parameter;       // alpha | beta | gamma | delta
    std::vector<double> values;  // grid, each within [0.1, 1]
    RunConfig scenario;
};

struct SweepRow {
    double value{0};
    double mean_trust{0};  // average final trust across agents
    int allow{0}, warn{0}, escalate{0}, block{0};
};

/// Re-runs the scenario once per grid value with only the swept weight
/// changed. Cells run under strict enforcement with the global trust floor
/// disabled so the action trace is identical across the grid and mean trust
/// responds to the weight alone.
std::vector<SweepRow> sweep(const SweepSpec& spec);

void write_sweep_csv(const std::string& path, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

// ── trajectories and heatmap ──

struct TrajectoryPoint {
    int step{0};
    std::string timestamp;
    double trust_after{0};
};

/// per-agent series in audit order, one point per action; verifies chain
/// continuity first and throws BrokenChain on a gap
std::map<std::string, std::vector<TrajectoryPoint>> trust_trajectories(
    const std::vector<AuditRecord>& audit);

void write_trajectories_csv(
    const std::string& path,
    const std::map<std::string, std::vector<TrajectoryPoint>>& series);

/// violation counts per agent per rule; clean rows do not contribute
std::map<std::string, std::map<std::string, int>> violation_heatmap(
    const std::vector<AuditRecord>& audit);

void write_heatmap_csv(const std::string& path,
                       const std::map<std::string, std::map<std::string, int>>& matrix);

}  // namespace gaas::metrics
