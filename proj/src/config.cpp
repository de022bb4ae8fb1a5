#include "gaas/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaas/errors.hpp"
#include "json.hpp"

namespace gaas {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(SimRegime r) {
    switch (r) {
        case SimRegime::sim1_ungoverned: return "sim1_ungoverned";
        case SimRegime::sim2_governed: return "sim2_governed";
        case SimRegime::sim3_adversarial: return "sim3_adversarial";
    }
    return "?";
}

std::optional<SimRegime> regime_from_string(const std::string& s) {
    if (s == "sim1_ungoverned") return SimRegime::sim1_ungoverned;
    if (s == "sim2_governed") return SimRegime::sim2_governed;
    if (s == "sim3_adversarial") return SimRegime::sim3_adversarial;
    return std::nullopt;
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

double num_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    try {
        if (doc.contains("domain")) cfg.domain = doc.at("domain").get<std::string>();
        if (doc.contains("policy")) cfg.policy_path = resolve(base_dir, doc.at("policy").get<std::string>());
        if (doc.contains("trust")) {
            const json& t = doc.at("trust");
            cfg.trust.weights.alpha = num_or(t, "alpha", cfg.trust.weights.alpha);
            cfg.trust.weights.beta = num_or(t, "beta", cfg.trust.weights.beta);
            cfg.trust.weights.gamma = num_or(t, "gamma", cfg.trust.weights.gamma);
            cfg.trust.weights.delta = num_or(t, "delta", cfg.trust.weights.delta);
            cfg.trust.lambda = num_or(t, "lambda", cfg.trust.lambda);
            cfg.trust.epsilon = num_or(t, "epsilon", cfg.trust.epsilon);
            if (t.contains("formulation")) {
                const auto f = t.at("formulation").get<std::string>();
                if (f == "main_text")
                    cfg.trust.formulation = TrustFormulation::main_text;
                else if (f == "normalized")
                    cfg.trust.formulation = TrustFormulation::normalized;
                else
                    throw ConfigError("unknown trust formulation '" + f + "'");
            }
        }
        if (doc.contains("enforcement")) {
            const json& e = doc.at("enforcement");
            if (e.contains("mode")) {
                const auto m = mode_from_string(e.at("mode").get<std::string>());
                if (!m) throw ConfigError("unknown enforcement mode");
                cfg.enforcement.mode = *m;
            }
            cfg.enforcement.theta = num_or(e, "theta", cfg.enforcement.theta);
            if (e.contains("tau")) cfg.enforcement.tau = e.at("tau").get<int>();
            cfg.enforcement.theta_warn = num_or(e, "theta_warn", cfg.enforcement.theta_warn);
            cfg.enforcement.theta_block = num_or(e, "theta_block", cfg.enforcement.theta_block);
            cfg.enforcement.theta_crit = num_or(e, "theta_crit", cfg.enforcement.theta_crit);
        }
        if (doc.contains("regime")) {
            const auto r = regime_from_string(doc.at("regime").get<std::string>());
            if (!r) throw ConfigError("unknown regime '" + doc.at("regime").get<std::string>() + "'");
            cfg.regime = *r;
        }
        if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("days")) cfg.days = doc.at("days").get<int>();
        if (doc.contains("rsi_period")) cfg.rsi_period = doc.at("rsi_period").get<int>();
        if (doc.contains("start_cash")) cfg.start_cash = doc.at("start_cash").get<double>();
        if (doc.contains("start_cash_overrides"))
            for (auto it = doc.at("start_cash_overrides").begin();
                 it != doc.at("start_cash_overrides").end(); ++it)
                cfg.start_cash_overrides[it.key()] = it.value().get<double>();
        if (doc.contains("agents"))
            cfg.agents = doc.at("agents").get<std::vector<std::string>>();
        if (doc.contains("market_data"))
            cfg.market_dir = resolve(base_dir, doc.at("market_data").get<std::string>());
        if (doc.contains("corpus"))
            cfg.corpus_path = resolve(base_dir, doc.at("corpus").get<std::string>());
        if (doc.contains("reference_corpus"))
            cfg.reference_corpus_path =
                resolve(base_dir, doc.at("reference_corpus").get<std::string>());
        if (doc.contains("lexicon"))
            cfg.lexicon_path = resolve(base_dir, doc.at("lexicon").get<std::string>());
        if (doc.contains("adversarial_catalog"))
            cfg.catalog_path = resolve(base_dir, doc.at("adversarial_catalog").get<std::string>());
        if (doc.contains("fault_plan")) {
            const json& f = doc.at("fault_plan");
            if (f.contains("seed")) cfg.fault_plan.seed = f.at("seed").get<std::uint64_t>();
            if (f.contains("file"))
                cfg.fault_plan.plan_file = resolve(base_dir, f.at("file").get<std::string>());
            if (f.contains("per_kind"))
                for (auto it = f.at("per_kind").begin(); it != f.at("per_kind").end(); ++it)
                    cfg.fault_plan.per_kind[it.key()] = it.value().get<int>();
        }
        if (doc.contains("out")) cfg.out_dir = resolve(base_dir, doc.at("out").get<std::string>());
        if (doc.contains("listen")) cfg.listen = doc.at("listen").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has wrong type: ") + e.what());
    }

    if (cfg.domain != "trading" && cfg.domain != "essay")
        throw ConfigError("domain must be 'trading' or 'essay'");
    if (cfg.trust.lambda <= 0.0 || cfg.trust.lambda > 1.0)
        throw ConfigError("trust.lambda must lie in (0, 1]");
    if (cfg.trust.epsilon <= 0.0) throw ConfigError("trust.epsilon must be > 0");
    if (cfg.enforcement.theta_block >= cfg.enforcement.theta_warn)
        throw ConfigError("enforcement.theta_block must be below theta_warn");
    if (cfg.enforcement.theta_crit > cfg.enforcement.theta_block)
        throw ConfigError("enforcement.theta_crit must not exceed theta_block");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), fs::path(path).parent_path().string());
}

void apply_env_overrides(RunConfig& cfg) {
    if (const char* listen = std::getenv("GAAS_LISTEN"); listen && *listen) cfg.listen = listen;
    if (const char* dir = std::getenv("GAAS_LOG_DIR"); dir && *dir)
        cfg.out_dir = (fs::path(dir) / fs::path(cfg.out_dir).filename()).string();
}

void apply_bundled_defaults(RunConfig& cfg) {
    const std::string data = GAAS_DATA_DIR;
    if (cfg.policy_path.empty())
        cfg.policy_path = data + (cfg.domain == "essay" ? "/policies/essay_rules.json"
                                                        : "/policies/trading_rules.json");
    if (cfg.market_dir.empty()) cfg.market_dir = data + "/market";
    if (cfg.corpus_path.empty()) cfg.corpus_path = data + "/corpus/drafts.json";
    if (cfg.reference_corpus_path.empty())
        cfg.reference_corpus_path = data + "/corpus/reference_corpus.txt";
    if (cfg.lexicon_path.empty()) cfg.lexicon_path = data + "/lexicon/keywords.txt";
    if (cfg.catalog_path.empty()) cfg.catalog_path = data + "/adversarial/catalog.json";
    if (cfg.agents.empty()) {
        if (cfg.domain == "trading")
            cfg.agents = {"momentum", "mean_reversion", "compliant_baseline", "greedy_oversizer"};
        else
            cfg.agents = {"idea_agent", "selection_agent", "writer_agent", "revision_agent",
                          "grammar_agent"};
    }
}

}  // namespace gaas
