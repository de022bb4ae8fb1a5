#include "gaas/rules.hpp"

#include <algorithm>
#include <set>

#include "gaas/errors.hpp"

namespace gaas {

using nlohmann::json;

const char* to_string(RuleType t) {
    switch (t) {
        case RuleType::coercive: return "coercive";
        case RuleType::normative: return "normative";
        case RuleType::mimetic: return "mimetic";
    }
    return "?";
}

std::optional<RuleType> rule_type_from_string(const std::string& s) {
    if (s == "coercive") return RuleType::coercive;
    if (s == "normative") return RuleType::normative;
    if (s == "mimetic") return RuleType::mimetic;
    return std::nullopt;
}

namespace {

// "trades_today(asset)" and "trades_today" mean the same field; the
// parenthesised spelling documents that the value is taken for the order's asset.
std::string normalize_field(std::string name) {
    const std::string suffix = "(asset)";
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
        name.erase(name.size() - suffix.size());
    return name;
}

Predicate::Cmp cmp_from_string(const std::string& s, const std::string& rule_id) {
    if (s == "eq") return Predicate::Cmp::eq;
    if (s == "ne") return Predicate::Cmp::ne;
    if (s == "lt") return Predicate::Cmp::lt;
    if (s == "le") return Predicate::Cmp::le;
    if (s == "gt") return Predicate::Cmp::gt;
    if (s == "ge") return Predicate::Cmp::ge;
    throw SchemaError("rule " + rule_id + ": unknown comparison op '" + s + "'");
}

const char* cmp_to_string(Predicate::Cmp c) {
    switch (c) {
        case Predicate::Cmp::eq: return "eq";
        case Predicate::Cmp::ne: return "ne";
        case Predicate::Cmp::lt: return "lt";
        case Predicate::Cmp::le: return "le";
        case Predicate::Cmp::gt: return "gt";
        case Predicate::Cmp::ge: return "ge";
    }
    return "?";
}

PredicatePtr parse_predicate(const json& j, const std::string& rule_id) {
    if (!j.is_object())
        throw SchemaError("rule " + rule_id + ": predicate node must be an object");
    auto node = std::make_shared<Predicate>();
    if (j.contains("all") || j.contains("any")) {
        const bool is_all = j.contains("all");
        node->kind = is_all ? Predicate::Kind::all_of : Predicate::Kind::any_of;
        const json& arr = is_all ? j.at("all") : j.at("any");
        if (!arr.is_array() || arr.empty())
            throw SchemaError("rule " + rule_id + ": 'all'/'any' needs a non-empty array");
        for (const auto& child : arr) node->children.push_back(parse_predicate(child, rule_id));
        return node;
    }
    if (j.contains("not")) {
        node->kind = Predicate::Kind::negate;
        node->children.push_back(parse_predicate(j.at("not"), rule_id));
        return node;
    }
    if (!j.contains("field") || !j.contains("op") || !j.contains("value"))
        throw SchemaError("rule " + rule_id + ": predicate leaf needs field/op/value");
    node->kind = Predicate::Kind::compare;
    node->field = normalize_field(j.at("field").get<std::string>());
    node->cmp = cmp_from_string(j.at("op").get<std::string>(), rule_id);
    const json& v = j.at("value");
    if (v.is_number()) {
        node->rhs = Predicate::Rhs::number;
        node->number = v.get<double>();
    } else if (v.is_string()) {
        node->rhs = Predicate::Rhs::text;
        node->text = v.get<std::string>();
    } else if (v.is_object() && v.contains("field")) {
        node->rhs = Predicate::Rhs::field;
        node->text = normalize_field(v.at("field").get<std::string>());
    } else {
        throw SchemaError("rule " + rule_id + ": predicate value must be number, string, or {field}");
    }
    return node;
}

json serialize_predicate(const Predicate& p) {
    json j;
    switch (p.kind) {
        case Predicate::Kind::all_of:
        case Predicate::Kind::any_of: {
            json arr = json::array();
            for (const auto& c : p.children) arr.push_back(serialize_predicate(*c));
            j[p.kind == Predicate::Kind::all_of ? "all" : "any"] = std::move(arr);
            break;
        }
        case Predicate::Kind::negate:
            j["not"] = serialize_predicate(*p.children.front());
            break;
        case Predicate::Kind::compare:
            j["field"] = p.field;
            j["op"] = cmp_to_string(p.cmp);
            if (p.rhs == Predicate::Rhs::number)
                j["value"] = p.number;
            else if (p.rhs == Predicate::Rhs::text)
                j["value"] = p.text;
            else
                j["value"] = json{{"field", p.text}};
            break;
    }
    return j;
}

Rule parse_rule(const json& j) {
    if (!j.is_object()) throw SchemaError("rule entry must be an object");
    if (!j.contains("id") || !j.at("id").is_string())
        throw SchemaError("rule entry missing string 'id'");
    Rule r;
    r.id = j.at("id").get<std::string>();
    if (j.contains("dimension")) r.dimension = j.at("dimension").get<std::string>();
    if (j.contains("description")) r.description = j.at("description").get<std::string>();

    if (!j.contains("type") || !j.at("type").is_string())
        throw SchemaError("rule " + r.id + ": missing string 'type'");
    const auto ts = j.at("type").get<std::string>();
    const auto t = rule_type_from_string(ts);
    if (!t) throw SchemaError("rule " + r.id + ": unknown rule type '" + ts + "'");
    r.type = *t;

    if (!j.contains("severity") || !j.at("severity").is_number())
        throw SchemaError("rule " + r.id + ": missing numeric 'severity'");
    r.severity = j.at("severity").get<double>();

    const bool has_pattern = j.contains("pattern");
    const bool has_predicate = j.contains("predicate");
    if (has_pattern == has_predicate)
        throw SchemaError("rule " + r.id + ": exactly one of 'pattern' or 'predicate' required");
    if (has_pattern) {
        if (!j.at("pattern").is_string())
            throw SchemaError("rule " + r.id + ": 'pattern' must be a string");
        r.condition = TextPattern{j.at("pattern").get<std::string>()};
    } else {
        r.condition = parse_predicate(j.at("predicate"), r.id);
    }

    static const std::set<std::string> known = {"id",       "dimension", "description", "pattern",
                                                "predicate", "type",      "severity"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) r.extras[it.key()] = it.value();
    return r;
}

}  // namespace

RuleSet parse_rule_set(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("rule document is not valid JSON at byte " + std::to_string(e.byte) +
                         ": " + e.what());
    }
    RuleSet rs;
    const json* rules = nullptr;
    if (doc.is_array()) {
        rules = &doc;
    } else if (doc.is_object()) {
        if (doc.contains("domain")) rs.domain = doc.at("domain").get<std::string>();
        if (doc.contains("version")) rs.version = doc.at("version").get<int>();
        if (!doc.contains("rules") || !doc.at("rules").is_array())
            throw SchemaError("rule document object needs a 'rules' array");
        rules = &doc.at("rules");
    } else {
        throw SchemaError("rule document must be an array or an object");
    }
    std::set<std::string> seen;
    for (const auto& entry : *rules) {
        Rule r = parse_rule(entry);
        if (!seen.insert(r.id).second)
            throw SchemaError("duplicate rule id '" + r.id + "'");
        rs.rules.push_back(std::move(r));
    }
    return rs;
}

std::string serialize_rule_set(const RuleSet& rs) {
    json doc;
    doc["domain"] = rs.domain;
    doc["version"] = rs.version;
    json arr = json::array();
    for (const auto& r : rs.rules) {
        json j;
        j["id"] = r.id;
        j["dimension"] = r.dimension;
        j["description"] = r.description;
        if (std::holds_alternative<TextPattern>(r.condition))
            j["pattern"] = std::get<TextPattern>(r.condition).source;
        else
            j["predicate"] = serialize_predicate(*std::get<PredicatePtr>(r.condition));
        j["type"] = to_string(r.type);
        j["severity"] = r.severity;
        if (r.extras.is_object())
            for (auto it = r.extras.begin(); it != r.extras.end(); ++it) j[it.key()] = it.value();
        arr.push_back(std::move(j));
    }
    doc["rules"] = std::move(arr);
    return doc.dump(2);
}

const std::set<std::string>& field_registry(const std::string& domain) {
    static const std::set<std::string> trading = {
        "order_side", "order_quantity", "order_price",       "order_value",  "cash",
        "net_equity", "position_fraction", "trades_today",   "rsi",          "shares_held"};
    static const std::set<std::string> essay = {
        "word_count",        "paragraph_count",    "ngram_overlap",
        "contrast_marker_count", "has_opening_marker", "has_closing_marker",
        "unsupported_claim_count"};
    static const std::set<std::string> all = [] {
        std::set<std::string> u = trading;
        u.insert(essay.begin(), essay.end());
        return u;
    }();
    if (domain == "trading") return trading;
    if (domain == "essay") return essay;
    return all;
}

namespace {

bool has_backreference(const std::string& pattern) {
    for (std::size_t i = 0; i + 1 < pattern.size(); ++i)
        if (pattern[i] == '\\' && pattern[i + 1] >= '1' && pattern[i + 1] <= '9') return true;
    return false;
}

void collect_fields(const Predicate& p, std::vector<std::string>& out) {
    if (p.kind == Predicate::Kind::compare) {
        out.push_back(p.field);
        if (p.rhs == Predicate::Rhs::field) out.push_back(p.text);
        return;
    }
    for (const auto& c : p.children) collect_fields(*c, out);
}

}  // namespace

ValidationReport validate_rule_set(const RuleSet& rs) {
    ValidationReport report;
    const auto& registry = field_registry(rs.domain);
    std::set<std::string> seen;
    for (const auto& r : rs.rules) {
        if (r.id.empty())
            report.findings.push_back({"empty_rule_id", r.id, "rule id must be non-empty"});
        if (!seen.insert(r.id).second)
            report.findings.push_back({"duplicate_rule_id", r.id, "rule id appears more than once"});
        if (r.severity < 0.0 || r.severity > 1.0)
            report.findings.push_back(
                {"severity_out_of_range", r.id, "severity must lie in [0, 1]"});
        if (std::holds_alternative<TextPattern>(r.condition)) {
            const auto& src = std::get<TextPattern>(r.condition).source;
            if (has_backreference(src)) {
                report.findings.push_back({"invalid_pattern", r.id, "backreferences not allowed"});
            } else {
                try {
                    std::regex probe(src, std::regex::ECMAScript | std::regex::icase);
                } catch (const std::regex_error& e) {
                    report.findings.push_back(
                        {"invalid_pattern", r.id, std::string("pattern does not compile: ") + e.what()});
                }
            }
        } else {
            std::vector<std::string> fields;
            collect_fields(*std::get<PredicatePtr>(r.condition), fields);
            for (const auto& f : fields)
                if (!registry.count(f))
                    report.findings.push_back(
                        {"unknown_field", r.id, "field '" + f + "' not in '" + rs.domain + "' registry"});
        }
    }
    return report;
}

CompiledRuleSetPtr compile_rule_set(const RuleSet& rs) {
    const auto report = validate_rule_set(rs);
    if (!report.ok()) {
        std::string msg = "rule set does not validate:";
        for (const auto& f : report.findings)
            msg += "\n  [" + f.kind + "] " + f.rule_id + ": " + f.message;
        throw CompileError(msg);
    }
    auto out = std::make_shared<CompiledRuleSet>();
    out->domain = rs.domain;
    out->version = rs.version;
    for (const auto& r : rs.rules) {
        CompiledRule cr;
        cr.rule = r;
        if (std::holds_alternative<TextPattern>(r.condition))
            cr.pattern.emplace(std::get<TextPattern>(r.condition).source,
                               std::regex::ECMAScript | std::regex::icase);
        out->rules.push_back(std::move(cr));
    }
    return out;
}

}  // namespace gaas
