#include "gaas/sim/faults.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/detail/rng.hpp"
#include "gaas/errors.hpp"
#include "json.hpp"

namespace gaas::sim {

using nlohmann::json;

const char* to_string(FaultKind k) {
    switch (k) {
        case FaultKind::oversized_position: return "oversized_position";
        case FaultKind::low_cash_buy: return "low_cash_buy";
        case FaultKind::short_sale: return "short_sale";
        case FaultKind::rsi_extreme: return "rsi_extreme";
        case FaultKind::overtrading_burst: return "overtrading_burst";
    }
    return "?";
}

std::optional<FaultKind> fault_kind_from_string(const std::string& s) {
    if (s == "oversized_position") return FaultKind::oversized_position;
    if (s == "low_cash_buy") return FaultKind::low_cash_buy;
    if (s == "short_sale") return FaultKind::short_sale;
    if (s == "rsi_extreme") return FaultKind::rsi_extreme;
    if (s == "overtrading_burst") return FaultKind::overtrading_burst;
    return std::nullopt;
}

std::vector<CatalogEntry> load_adversarial_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open adversarial catalog: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("catalog is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SchemaError("catalog must be a JSON array");
    std::vector<CatalogEntry> out;
    for (const auto& j : doc) {
        CatalogEntry e;
        e.family = j.at("family").get<std::string>();
        e.payload = j.at("payload").get<std::string>();
        e.expected_rule = j.at("expected_rule").get<std::string>();
        e.expected_type = j.at("expected_type").get<std::string>();
        if (j.contains("order")) {
            const json& o = j.at("order");
            TradeOrder order;
            order.asset = o.at("asset").get<std::string>();
            const auto side = order_side_from_string(o.at("side").get<std::string>());
            if (!side) throw SchemaError("catalog order has bad side");
            order.side = *side;
            order.quantity = o.at("quantity").get<std::int64_t>();
            order.limit_price = o.at("limit_price").get<double>();
            e.materialize = order;
        }
        out.push_back(std::move(e));
    }
    return out;
}

FaultPlan generate_trading_fault_plan(std::uint64_t seed,
                                      const std::map<std::string, int>& per_kind, int days,
                                      const std::vector<std::string>& agents,
                                      const std::vector<std::string>& assets, int first_slot) {
    if (agents.empty() || assets.empty())
        throw ConfigError("fault plan needs agents and assets");
    if (first_slot >= days) throw ConfigError("fault plan window is empty");
    detail::Rng rng(seed);
    FaultPlan plan;
    for (const auto& [kind_name, count] : per_kind) {  // map order keeps this deterministic
        const auto kind = fault_kind_from_string(kind_name);
        if (!kind) throw ConfigError("unknown fault kind '" + kind_name + "'");
        for (int i = 0; i < count; ++i) {
            FaultPlanEntry e;
            e.slot = static_cast<int>(rng.uniform_int(first_slot, days - 1));
            e.agent_id = agents[static_cast<std::size_t>(rng.uniform_int(
                0, static_cast<std::int64_t>(agents.size()) - 1))];
            e.kind = *kind;
            e.asset = assets[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(assets.size()) - 1))];
            plan.entries.push_back(std::move(e));
        }
    }
    std::stable_sort(plan.entries.begin(), plan.entries.end(),
                     [](const FaultPlanEntry& a, const FaultPlanEntry& b) { return a.slot < b.slot; });
    return plan;
}

FaultPlan generate_essay_fault_plan(std::uint64_t seed, const std::vector<CatalogEntry>& catalog,
                                    int scenarios) {
    if (scenarios <= 0) throw ConfigError("essay fault plan needs scenarios");
    detail::Rng rng(seed);
    FaultPlan plan;
    int next_slot = 0;
    for (const auto& entry : catalog) {
        if (entry.materialize) continue;  // order-shaped payloads belong to the trading sim
        FaultPlanEntry e;
        e.slot = next_slot;
        next_slot = (next_slot + 1 + static_cast<int>(rng.uniform_int(0, 1))) % scenarios;
        e.agent_id = "adv_" + entry.family;
        e.is_text = true;
        e.attack = entry;
        plan.entries.push_back(std::move(e));
    }
    std::stable_sort(plan.entries.begin(), plan.entries.end(),
                     [](const FaultPlanEntry& a, const FaultPlanEntry& b) { return a.slot < b.slot; });
    return plan;
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (auto& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

}  // namespace

void write_ledger_csv(const std::string& path, const std::vector<LedgerEntry>& entries) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write ledger: " + path);
    out << kLedgerHeader << '\n';
    for (const auto& e : entries) {
        out << e.run_id << ','
            << (e.timestamp == 0 ? "-" : detail::format_iso8601(e.timestamp)) << ','
            << e.agent_id << ',' << e.fault_kind << ',' << e.asset << ',' << e.expected_rule
            << ',' << e.expected_type << ',' << e.status << ',' << sanitize(e.detail) << '\n';
    }
}

std::vector<LedgerEntry> read_ledger_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open ledger: " + path);
    std::vector<LedgerEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (detail::trim(line) != kLedgerHeader)
                throw FormatError("ledger line 1: unexpected header");
            continue;
        }
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        f.push_back(cur);
        if (f.size() != 9)
            throw FormatError("ledger line " + std::to_string(line_no) + ": expected 9 fields");
        LedgerEntry e;
        e.run_id = detail::trim(f[0]);
        const std::string ts = detail::trim(f[1]);
        if (ts != "-") {
            const auto parsed = detail::parse_iso8601(ts);
            if (!parsed)
                throw FormatError("ledger line " + std::to_string(line_no) + ": bad timestamp");
            e.timestamp = *parsed;
        }
        e.agent_id = detail::trim(f[2]);
        e.fault_kind = detail::trim(f[3]);
        e.asset = detail::trim(f[4]);
        e.expected_rule = detail::trim(f[5]);
        e.expected_type = detail::trim(f[6]);
        e.status = detail::trim(f[7]);
        e.detail = detail::trim(f[8]);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace gaas::sim
