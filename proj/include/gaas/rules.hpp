#pragma once

// Declarative governance rules. A rule document is JSON; each rule carries
// either a case-insensitive text pattern or a structured predicate over a
// domain field registry. Parsing, validation, and compilation are pure.

#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace gaas {

enum class RuleType { coercive, normative, mimetic };

const char* to_string(RuleType t);
std::optional<RuleType> rule_type_from_string(const std::string& s);

/** Regex source over the portable subset: alternation, classes, anchors,
 *  quantifiers. Backreferences are rejected at validation time. */
struct TextPattern {
    std::string source;
};

/** Structured predicate tree. Leaves compare a registry field against a
 *  literal or another field; inner nodes are all/any/not. */
struct Predicate {
    enum class Kind { all_of, any_of, negate, compare };
    enum class Cmp { eq, ne, lt, le, gt, ge };
    enum class Rhs { number, text, field };

    Kind kind{Kind::compare};
    std::vector<std::shared_ptr<const Predicate>> children;

    // compare leaves only
    std::string field;
    Cmp cmp{Cmp::eq};
    Rhs rhs{Rhs::number};
    double number{0.0};
    std::string text;  // string literal or referenced field name
};

using PredicatePtr = std::shared_ptr<const Predicate>;
using RuleCondition = std::variant<TextPattern, PredicatePtr>;

struct Rule {
    std::string id;
    std::string dimension;
    std::string description;
    RuleCondition condition;
    RuleType type{RuleType::normative};
    double severity{0.0};
    nlohmann::json extras;  // unknown document fields, preserved on serialize
};

struct RuleSet {
    std::string domain;  // selects the predicate field registry
    int version{0};
    std::vector<Rule> rules;
};

// ── parse / serialize ──

/// Accepts either a top-level array of rule objects or an object with
/// {domain, version, rules}. Throws ParseError (malformed JSON, with byte
/// offset) or SchemaError (bad rule structure, naming the offending rule).
RuleSet parse_rule_set(const std::string& json_text);

/// Inverse of parse_rule_set; preserved unknown fields are emitted back.
std::string serialize_rule_set(const RuleSet& rs);

// ── validation ──

struct Finding {
    std::string kind;     // duplicate_rule_id, severity_out_of_range, invalid_pattern,
                          // unknown_field, empty_rule_id
    std::string rule_id;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

ValidationReport validate_rule_set(const RuleSet& rs);

/// Predicate field names legal for a domain ("trading", "essay"); any other
/// label gets the union so hand-rolled domains validate leniently.
const std::set<std::string>& field_registry(const std::string& domain);

// ── compilation ──

struct CompiledRule {
    Rule rule;
    std::optional<std::regex> pattern;  // engaged iff condition is TextPattern
};

/** Immutable snapshot evaluated by the matcher. */
struct CompiledRuleSet {
    std::string domain;
    int version{0};
    std::vector<CompiledRule> rules;
};

using CompiledRuleSetPtr = std::shared_ptr<const CompiledRuleSet>;

/// Validates then compiles; throws CompileError listing findings if the set
/// does not validate cleanly.
CompiledRuleSetPtr compile_rule_set(const RuleSet& rs);

}  // namespace gaas
