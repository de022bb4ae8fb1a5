#pragma once

// One JSON config format shared by every CLI subcommand. Flags override
// config values; GAAS_LISTEN and GAAS_LOG_DIR override defaults from the
// environment. Relative paths resolve against the config file's directory.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gaas/enforcement.hpp"
#include "gaas/trust.hpp"

namespace gaas {

enum class SimRegime { sim1_ungoverned, sim2_governed, sim3_adversarial };

const char* to_string(SimRegime r);
std::optional<SimRegime> regime_from_string(const std::string& s);

struct FaultPlanSpec {
    std::uint64_t seed{7};
    std::map<std::string, int> per_kind;  // fault kind -> injection count
    std::string plan_file;                // explicit plan overrides seeded generation
};

struct RunConfig {
    std::string domain{"trading"};  // "trading" or "essay"
    std::string policy_path;
    TrustConfig trust;
    EnforcementConfig enforcement;
    SimRegime regime{SimRegime::sim2_governed};
    std::uint64_t seed{42};
    int days{60};
    int rsi_period{14};
    double start_cash{10000.0};
    std::map<std::string, double> start_cash_overrides;  // per-agent
    std::vector<std::string> agents;
    std::string market_dir;
    std::string corpus_path;
    std::string reference_corpus_path;
    std::string lexicon_path;
    std::string catalog_path;
    FaultPlanSpec fault_plan;
    std::string out_dir{"runs/out"};
    std::string listen{"127.0.0.1:8080"};
};

/// throws ConfigError on malformed content; unknown keys are ignored
RunConfig load_run_config(const std::string& path);

/// parses the same JSON from a string (base_dir resolves relative paths)
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

/// applies GAAS_LISTEN and GAAS_LOG_DIR
void apply_env_overrides(RunConfig& cfg);

/// bundled defaults for anything left empty (policy pack, corpus, lexicon...)
void apply_bundled_defaults(RunConfig& cfg);

}  // namespace gaas
