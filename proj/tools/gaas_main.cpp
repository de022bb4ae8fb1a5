#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gaas/config.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"
#include "gaas/gateway.hpp"
#include "gaas/http_service.hpp"
#include "gaas/metrics.hpp"
#include "gaas/rules.hpp"
#include "gaas/sim/harness.hpp"
#include "gaas/sim/market.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;  // domain failure: findings, blocked start, bad data
constexpr int kUsage = 2;    // usage or IO

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gaas::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

gaas::RunConfig load_config(const std::string& path, const std::string& policy,
                            const std::string& out, std::optional<std::uint64_t> seed,
                            const std::string& regime, const std::string& listen) {
    gaas::RunConfig cfg = gaas::load_run_config(path);
    if (!policy.empty()) cfg.policy_path = policy;
    if (!out.empty()) cfg.out_dir = out;
    if (seed) cfg.seed = *seed;
    if (!regime.empty()) {
        const auto r = gaas::regime_from_string(regime);
        if (!r) throw gaas::ConfigError("unknown regime '" + regime + "'");
        cfg.regime = *r;
    }
    if (!listen.empty()) cfg.listen = listen;
    gaas::apply_env_overrides(cfg);
    gaas::apply_bundled_defaults(cfg);
    return cfg;
}

int cmd_validate(const std::string& policy_path) {
    std::string text;
    try {
        text = slurp(policy_path);
    } catch (const gaas::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }
    try {
        const auto rs = gaas::parse_rule_set(text);
        const auto report = gaas::validate_rule_set(rs);
        if (report.ok()) {
            std::cout << "ok: " << rs.rules.size() << " rules, domain " << rs.domain << "\n";
            return kOk;
        }
        for (const auto& f : report.findings)
            std::cerr << f.kind << " (" << f.rule_id << "): " << f.message << "\n";
        return kFailure;
    } catch (const gaas::Error& e) {
        std::cerr << e.what() << "\n";
        return kFailure;
    }
}

int cmd_serve(const gaas::RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    auto audit = std::make_shared<gaas::AuditStore>(cfg.out_dir + "/audit.csv");
    auto sink = std::make_shared<gaas::FileSink>(cfg.out_dir + "/deliveries.jsonl");
    gaas::GatewayConfig gw;
    gw.trust = cfg.trust;
    gw.enforcement = cfg.enforcement;
    auto gateway = std::make_shared<gaas::Gateway>(gw, sink, audit);
    gateway->put_policy(cfg.domain, slurp(cfg.policy_path));
    if (cfg.domain == "essay") {
        gaas::TextAnalyzer analyzer;
        analyzer.load_reference_file(cfg.reference_corpus_path);
        gateway->set_text_analyzer(cfg.domain, std::move(analyzer));
    }

    gaas::HttpService service(gateway);
    const auto [host, port] = gaas::parse_listen_address(cfg.listen);
    service.start(host, port);
    std::cout << "listening on " << host << ":" << service.bound_port() << " (domain "
              << cfg.domain << ", policy v" << gateway->active_policy_version(cfg.domain)
              << ", audit " << cfg.out_dir << "/audit.csv)" << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
    std::cout << "shut down, " << audit->size() << " audit rows\n";
    return kOk;
}

int cmd_sim(const gaas::RunConfig& cfg) {
    const auto art = gaas::sim::run_sim(cfg);
    std::cout << "run " << art.run_id << " (" << to_string(cfg.regime) << ", " << cfg.domain
              << ")\n"
              << "  actions " << art.actions << ": allow " << art.stats.allow << ", warn "
              << art.stats.warn << ", escalate " << art.stats.escalate << ", block "
              << art.stats.block << "\n";
    if (cfg.domain == "trading")
        std::cout << "  executed trades " << art.stats.executed_trades << "\n";
    std::cout << "  artifacts in " << art.run_dir << "\n";
    return kOk;
}

int cmd_sweep(const gaas::RunConfig& scenario, const std::string& spec_path,
              const std::string& out_csv) {
    json spec = json::parse(slurp(spec_path));
    std::vector<std::string> parameters;
    if (spec.contains("parameters"))
        for (const auto& p : spec.at("parameters")) parameters.push_back(p.get<std::string>());
    else if (spec.contains("parameter"))
        parameters.push_back(spec.at("parameter").get<std::string>());
    if (parameters.empty()) {
        std::cerr << "sweep spec names no parameters\n";
        return kUsage;
    }
    std::vector<double> values;
    for (const auto& v : spec.at("values")) values.push_back(v.get<double>());
    if (values.empty()) {
        std::cerr << "sweep spec has an empty value grid\n";
        return kUsage;
    }

    const std::string path = out_csv.empty() ? scenario.out_dir + "/sweep.csv" : out_csv;
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? "."
                               : fs::path(path).parent_path().string());
    std::ofstream out(path, std::ios::trunc);
    out << "parameter,value,mean_trust,allow,warn,escalate,block\n";
    for (const auto& param : parameters) {
        gaas::metrics::SweepSpec s;
        s.parameter = param;
        s.values = values;
        s.scenario = scenario;
        s.scenario.out_dir = scenario.out_dir + "/cells";
        for (const auto& row : gaas::metrics::sweep(s))
            out << param << ',' << gaas::detail::render_double(row.value) << ','
                << gaas::detail::render_double(row.mean_trust) << ',' << row.allow << ','
                << row.warn << ',' << row.escalate << ',' << row.block << '\n';
        std::cout << param << ": " << values.size() << " cells\n";
    }
    std::cout << "sweep table: " << path << "\n";
    return kOk;
}

int cmd_report(const std::string& run_dir) {
    const std::string audit_path = run_dir + "/audit.csv";
    const std::string ledger_path = run_dir + "/ledger.csv";
    if (!fs::exists(audit_path)) {
        std::cerr << "missing artifact: " << audit_path << "\n";
        return kUsage;
    }
    const auto audit = gaas::read_audit_csv(audit_path);
    std::vector<gaas::sim::LedgerEntry> ledger;
    if (fs::exists(ledger_path)) ledger = gaas::sim::read_ledger_csv(ledger_path);
    std::string run_id;
    if (fs::exists(run_dir + "/run.json"))
        run_id = json::parse(slurp(run_dir + "/run.json")).value("run_id", std::string());

    std::ostringstream summary;
    summary << "run " << (run_id.empty() ? std::string("(unknown)") : run_id) << ": "
            << audit.size() << " audit rows, " << ledger.size() << " ledger rows\n";
    const auto render = [](const std::optional<double>& v) {
        return v ? gaas::detail::render_double(*v) : std::string("undefined");
    };
    const auto describe = [&](const char* label, gaas::metrics::HarmScope scope) {
        const auto c = gaas::metrics::confusion(audit, ledger, scope, run_id);
        const auto prf = gaas::metrics::derive_prf(c);
        summary << label << ": tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " tn=" << c.tn
                << "  precision=" << render(prf.precision) << " recall=" << render(prf.recall)
                << " f1=" << render(prf.f1) << "\n";
    };
    if (!ledger.empty()) {
        describe("all injected faults", gaas::metrics::HarmScope::all_injected);
        describe("coercive faults   ", gaas::metrics::HarmScope::coercive_injected);
    }

    const auto series = gaas::metrics::trust_trajectories(audit);
    gaas::metrics::write_trajectories_csv(run_dir + "/trust_trajectories.csv", series);
    const auto heat = gaas::metrics::violation_heatmap(audit);
    gaas::metrics::write_heatmap_csv(run_dir + "/heatmap.csv", heat);
    summary << "trajectories: " << series.size() << " agents -> trust_trajectories.csv\n"
            << "heatmap: " << heat.size() << " agents -> heatmap.csv\n";

    std::ofstream out(run_dir + "/metrics_summary.txt", std::ios::trunc);
    out << summary.str();
    std::cout << summary.str();
    return kOk;
}

int cmd_gen_market(const std::string& out_dir, std::uint64_t seed, int days,
                   const std::vector<std::string>& assets, bool zigzag) {
    fs::create_directories(out_dir);
    if (zigzag) {
        for (const auto& asset : assets)
            gaas::sim::write_market_csv(out_dir + "/" + asset + ".csv",
                                        gaas::sim::generate_zigzag(days));
    } else {
        const auto data = gaas::sim::generate_market_data(seed, assets, days);
        for (const auto& [asset, bars] : data)
            gaas::sim::write_market_csv(out_dir + "/" + asset + ".csv", bars);
    }
    std::cout << assets.size() << " series x " << days << " days -> " << out_dir << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"runtime governance gate: policy checks, enforcement service, simulations"};
    app.require_subcommand(1);

    std::string config_path, policy_path, out_dir, regime, listen, sweep_spec, run_dir;
    std::optional<std::uint64_t> seed;

    auto add_config_flags = [&](CLI::App* cmd, bool config_required) {
        cmd->add_option("--config", config_path, "run configuration file")
            ->required(config_required);
        cmd->add_option("--policy", policy_path, "rule pack path (overrides config)");
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "run seed (overrides config)");
        cmd->add_option("--regime", regime, "sim1_ungoverned | sim2_governed | sim3_adversarial");
        cmd->add_option("--listen", listen, "host:port (overrides config)");
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a rule pack");
    validate->add_option("--policy", policy_path, "rule pack path")->required();

    auto* serve = app.add_subcommand("serve", "run the enforcement gateway");
    add_config_flags(serve, true);

    auto* sim = app.add_subcommand("sim", "run a simulation regime");
    add_config_flags(sim, true);

    auto* sweep = app.add_subcommand("sweep", "weight sensitivity grid");
    add_config_flags(sweep, true);
    sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
    std::string sweep_out;
    sweep->add_option("--table", sweep_out, "output CSV path");

    auto* report = app.add_subcommand("report", "metrics from a finished run directory");
    report->add_option("--run", run_dir, "run directory")->required();

    auto* gen = app.add_subcommand("gen-market", "regenerate bundled market data");
    std::string gen_out = "data/market";
    std::uint64_t gen_seed = 20250501;
    int gen_days = 60;
    std::vector<std::string> gen_assets{"ACME", "GLOBEX"};
    bool gen_zigzag = false;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--days", gen_days, "bars per series");
    gen->add_option("--assets", gen_assets, "asset symbols")->delimiter(',');
    gen->add_flag("--zigzag", gen_zigzag, "alternating closes (flat rsi fixture)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(policy_path);
        if (report->parsed()) return cmd_report(run_dir);
        if (gen->parsed()) return cmd_gen_market(gen_out, gen_seed, gen_days, gen_assets, gen_zigzag);

        const gaas::RunConfig cfg =
            load_config(config_path, policy_path, out_dir, seed, regime, listen);
        if (serve->parsed()) return cmd_serve(cfg);
        if (sim->parsed()) return cmd_sim(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, sweep_spec, sweep_out);
    } catch (const gaas::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const gaas::Error& e) {
        std::cerr << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
