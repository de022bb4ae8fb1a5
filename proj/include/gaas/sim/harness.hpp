#pragma once

// End-to-end simulation driver. Three regimes share one loop: ungoverned
// (enforcement bypassed, shadow violations still recorded), governed, and
// adversarial (governed plus fault injection). Runs are deterministic: same
// config and seed produce byte-identical artifacts.

#include <map>
#include <string>
#include <vector>

#include "gaas/audit.hpp"
#include "gaas/config.hpp"
#include "gaas/gateway.hpp"
#include "gaas/sim/faults.hpp"
#include "gaas/sim/market.hpp"

namespace gaas::sim {

struct RunStats {
    int allow{0}, warn{0}, block{0}, escalate{0};
    int executed_trades{0};
    int unfillable{0};  // permitted but structurally unfillable (ungoverned shorts etc.)
};

struct RunArtifacts {
    std::string run_dir;
    std::string run_id;
    std::vector<AuditRecord> audit;
    std::vector<LedgerEntry> ledger;
    std::map<std::string, double> final_trust;
    std::size_t actions{0};  // governance checks performed
    RunStats stats;
};

/// stable fingerprint of the inputs that define a run
std::string compute_run_id(const RunConfig& cfg);

/// Daily loop: signals, fault injection into the pending stream (adversarial
/// regime), governance check per order, execution of permitted fills at the
/// close, metric logging. Writes audit.csv, ledger.csv, trust_trajectories.csv,
/// portfolio.csv, deliveries.jsonl, run.json under cfg.out_dir.
RunArtifacts run_trading_sim(const RunConfig& cfg);

/// Scenario pipeline: idea, selection, writing, revision, grammar roles emit
/// scripted texts per scenario; the adversarial regime interleaves catalog
/// payloads. Same artifact set minus portfolio.csv.
RunArtifacts run_essay_sim(const RunConfig& cfg);

/// dispatches on cfg.domain
RunArtifacts run_sim(const RunConfig& cfg);

}  // namespace gaas::sim
