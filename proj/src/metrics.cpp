#include "gaas/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"
#include "gaas/sim/harness.hpp"

namespace gaas::metrics {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool word_at(const std::string& text, std::size_t pos, std::size_t len) {
    const auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    if (pos > 0 && alnum(text[pos - 1])) return false;
    const std::size_t end = pos + len;
    if (end < text.size() && alnum(text[end])) return false;
    return true;
}

}  // namespace

ConfusionCounts confusion(const std::vector<AuditRecord>& audit,
                          const std::vector<sim::LedgerEntry>& ledger, HarmScope scope,
                          const std::string& audit_run_id) {
    std::set<std::pair<std::string, std::int64_t>> harmful;
    for (const auto& e : ledger) {
        if (!audit_run_id.empty() && e.run_id != audit_run_id)
            throw RunMismatch("ledger row for run " + e.run_id + " joined against run " +
                              audit_run_id);
        if (e.status != "injected") continue;
        if (scope == HarmScope::coercive_injected && e.expected_type != "coercive") continue;
        harmful.emplace(e.agent_id, e.timestamp);
    }

    // one entry per distinct action; final verdict repeats on every row
    std::map<std::pair<std::string, std::int64_t>, Verdict> actions;
    for (const auto& r : audit) actions[std::make_pair(r.agent_id, r.timestamp)] = r.decision;

    ConfusionCounts c;
    for (const auto& [key, verdict] : actions) {
        const bool harm = harmful.count(key) > 0;
        const bool blocked = verdict == Verdict::block;
        if (harm && blocked) ++c.tp;
        else if (harm) ++c.fn;
        else if (blocked) ++c.fp;
        else ++c.tn;
    }
    return c;
}

Prf derive_prf(const ConfusionCounts& c) {
    Prf out;
    if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (out.precision && out.recall && *out.precision + *out.recall > 0)
        out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
    return out;
}

std::vector<std::string> load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon: " + path);
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        terms.push_back(lower(t));
    }
    return terms;
}

bool keyword_blocked(const Action& action, const std::vector<std::string>& lexicon) {
    if (action.kind == ActionKind::trade_order) return false;
    if (action.text.empty()) return false;
    const std::string text = lower(action.text);
    for (const auto& term : lexicon) {
        if (term.empty()) continue;
        const bool phrase = term.find_first_of(" -") != std::string::npos;
        std::size_t pos = text.find(term);
        while (pos != std::string::npos) {
            if (phrase || word_at(text, pos, term.size())) return true;
            pos = text.find(term, pos + 1);
        }
    }
    return false;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep grid is empty");
    for (double v : spec.values)
        if (v < 0.1 || v > 1.0)
            throw ConfigError("sweep value " + detail::render_double(v) + " outside [0.1, 1]");
    double TrustWeights::*member = nullptr;
    if (spec.parameter == "alpha") member = &TrustWeights::alpha;
    else if (spec.parameter == "beta") member = &TrustWeights::beta;
    else if (spec.parameter == "gamma") member = &TrustWeights::gamma;
    else if (spec.parameter == "delta") member = &TrustWeights::delta;
    else throw ConfigError("unknown sweep parameter '" + spec.parameter + "'");

    std::vector<SweepRow> rows;
    int cell = 0;
    for (double v : spec.values) {
        RunConfig cfg = spec.scenario;
        cfg.trust.weights.*member = v;
        cfg.enforcement.mode = EnforcementMode::strict;
        cfg.enforcement.theta_crit = -1e18;  // keep the trace weight-independent
        cfg.out_dir = spec.scenario.out_dir + "/" + spec.parameter + "_" + std::to_string(cell++);
        const auto art = sim::run_sim(cfg);
        SweepRow row;
        row.value = v;
        double sum = 0;
        for (const auto& [agent, tf] : art.final_trust) sum += tf;
        row.mean_trust = art.final_trust.empty() ? 0 : sum / art.final_trust.size();
        row.allow = art.stats.allow;
        row.warn = art.stats.warn;
        row.escalate = art.stats.escalate;
        row.block = art.stats.block;
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::string& path, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path);
    out << parameter << ",mean_trust,allow,warn,escalate,block\n";
    for (const auto& r : rows)
        out << detail::render_double(r.value) << ',' << detail::render_double(r.mean_trust) << ','
            << r.allow << ',' << r.warn << ',' << r.escalate << ',' << r.block << '\n';
}

std::map<std::string, std::vector<TrajectoryPoint>> trust_trajectories(
    const std::vector<AuditRecord>& audit) {
    verify_trust_chain(audit);
    std::map<std::string, std::vector<TrajectoryPoint>> series;
    std::map<std::string, std::string> last_key;
    for (const auto& r : audit) {
        // rows of one action share timestamp and trust pair; keep one point
        const std::string key =
            std::to_string(r.timestamp) + "|" + detail::render_double(r.trust_after);
        auto& mine = series[r.agent_id];
        if (!mine.empty() && last_key[r.agent_id] == key) continue;
        TrajectoryPoint p;
        p.step = static_cast<int>(mine.size()) + 1;
        p.timestamp = detail::format_iso8601(r.timestamp);
        p.trust_after = r.trust_after;
        mine.push_back(p);
        last_key[r.agent_id] = key;
    }
    return series;
}

void write_trajectories_csv(
    const std::string& path,
    const std::map<std::string, std::vector<TrajectoryPoint>>& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path);
    out << "agent_id,step,timestamp,trust_after\n";
    for (const auto& [agent, points] : series)
        for (const auto& p : points)
            out << agent << ',' << p.step << ',' << p.timestamp << ','
                << detail::render_double(p.trust_after) << '\n';
}

std::map<std::string, std::map<std::string, int>> violation_heatmap(
    const std::vector<AuditRecord>& audit) {
    std::map<std::string, std::map<std::string, int>> matrix;
    for (const auto& r : audit)
        if (r.rule_id != "-") ++matrix[r.agent_id][r.rule_id];
    return matrix;
}

void write_heatmap_csv(const std::string& path,
                       const std::map<std::string, std::map<std::string, int>>& matrix) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path);
    std::set<std::string> rules;
    for (const auto& [agent, counts] : matrix)
        for (const auto& [rule, n] : counts) rules.insert(rule);
    out << "agent_id";
    for (const auto& r : rules) out << ',' << r;
    out << '\n';
    for (const auto& [agent, counts] : matrix) {
        out << agent;
        for (const auto& r : rules) {
            const auto it = counts.find(r);
            out << ',' << (it == counts.end() ? 0 : it->second);
        }
        out << '\n';
    }
}

}  // namespace gaas::metrics
