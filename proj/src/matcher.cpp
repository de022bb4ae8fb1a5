#include "gaas/matcher.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"

namespace gaas {

const char* to_string(OrderSide s) { return s == OrderSide::buy ? "buy" : "sell"; }

std::optional<OrderSide> order_side_from_string(const std::string& s) {
    if (s == "buy") return OrderSide::buy;
    if (s == "sell") return OrderSide::sell;
    return std::nullopt;
}

double compute_rsi(const std::vector<double>& closes, int period) {
    if (period < 1) throw InsufficientData("rsi period must be >= 1");
    if (closes.size() < static_cast<std::size_t>(period) + 1)
        throw InsufficientData("rsi needs at least period+1 closes, got " +
                               std::to_string(closes.size()));
    double avg_gain = 0.0, avg_loss = 0.0;
    for (int i = 1; i <= period; ++i) {
        const double d = closes[i] - closes[i - 1];
        if (d > 0)
            avg_gain += d;
        else
            avg_loss -= d;
    }
    avg_gain /= period;
    avg_loss /= period;
    for (std::size_t i = period + 1; i < closes.size(); ++i) {
        const double d = closes[i] - closes[i - 1];
        avg_gain = (avg_gain * (period - 1) + (d > 0 ? d : 0.0)) / period;
        avg_loss = (avg_loss * (period - 1) + (d < 0 ? -d : 0.0)) / period;
    }
    if (avg_gain == 0.0 && avg_loss == 0.0) return 50.0;  // flat window convention
    if (avg_loss == 0.0) return 100.0;
    if (avg_gain == 0.0) return 0.0;
    const double rs = avg_gain / avg_loss;
    return 100.0 - 100.0 / (1.0 + rs);
}

namespace {

struct FieldValue {
    bool is_text{false};
    double num{0.0};
    std::string text;

    std::string render() const { return is_text ? text : detail::render_double(num); }
};

double close_or_throw(const EvaluationContext& ctx, const std::string& asset) {
    const auto it = ctx.market.last_close.find(asset);
    if (it == ctx.market.last_close.end())
        throw ContextMissing("no last close for asset '" + asset + "'");
    return it->second;
}

/// net equity marked at last close; throws if any held asset lacks a close
double net_equity(const PortfolioState& p, const EvaluationContext& ctx) {
    double eq = p.cash;
    for (const auto& [asset, shares] : p.holdings) {
        if (shares == 0) continue;
        eq += static_cast<double>(shares) * close_or_throw(ctx, asset);
    }
    return eq;
}

FieldValue resolve_trading_field(const std::string& name, const TradeOrder& order,
                                 const EvaluationContext& ctx) {
    const auto& p = ctx.portfolio;
    if (name == "order_side") return {true, 0.0, to_string(order.side)};
    if (name == "order_quantity") return {false, static_cast<double>(order.quantity), {}};
    if (name == "order_price") return {false, order.limit_price, {}};
    if (name == "order_value")
        return {false, static_cast<double>(order.quantity) * order.limit_price, {}};
    if (name == "cash") return {false, p.cash, {}};
    if (name == "net_equity") return {false, net_equity(p, ctx), {}};
    if (name == "shares_held") {
        const auto it = p.holdings.find(order.asset);
        return {false, it == p.holdings.end() ? 0.0 : static_cast<double>(it->second), {}};
    }
    if (name == "trades_today") {
        // executed today plus the candidate order itself
        const auto it = p.trades_today.find(order.asset);
        return {false, (it == p.trades_today.end() ? 0.0 : it->second) + 1.0, {}};
    }
    if (name == "rsi") {
        const auto it = ctx.market.rsi.find(order.asset);
        if (it == ctx.market.rsi.end())
            throw ContextMissing("no rsi for asset '" + order.asset + "'");
        return {false, it->second, {}};
    }
    if (name == "position_fraction") {
        // post-trade position value over post-trade net equity, marked at last close
        const double qty = static_cast<double>(order.quantity);
        const double signed_qty = order.side == OrderSide::buy ? qty : -qty;
        PortfolioState post = p;
        post.cash -= signed_qty * order.limit_price;
        post.holdings[order.asset] += static_cast<std::int64_t>(signed_qty);
        const double position = static_cast<double>(post.holdings[order.asset]) *
                                close_or_throw(ctx, order.asset);
        const double eq = net_equity(post, ctx);
        if (eq <= 0.0)
            return {false, position > 0.0 ? std::numeric_limits<double>::infinity() : 0.0, {}};
        return {false, position / eq, {}};
    }
    throw ContextMissing("unknown trading field '" + name + "'");
}

FieldValue resolve_text_field(const std::string& name, const TextFeatures& f) {
    if (name == "word_count") return {false, f.word_count, {}};
    if (name == "paragraph_count") return {false, f.paragraph_count, {}};
    if (name == "ngram_overlap") return {false, f.ngram_overlap, {}};
    if (name == "contrast_marker_count") return {false, f.contrast_marker_count, {}};
    if (name == "has_opening_marker") return {false, f.has_opening_marker, {}};
    if (name == "has_closing_marker") return {false, f.has_closing_marker, {}};
    if (name == "unsupported_claim_count") return {false, f.unsupported_claim_count, {}};
    throw ContextMissing("unknown text field '" + name + "'");
}

using FieldResolver = std::function<FieldValue(const std::string&)>;

bool compare(const FieldValue& lhs, Predicate::Cmp cmp, const FieldValue& rhs,
             const std::string& field) {
    if (lhs.is_text || rhs.is_text) {
        if (lhs.is_text != rhs.is_text)
            throw SchemaError("field '" + field + "': string compared against number");
        if (cmp == Predicate::Cmp::eq) return lhs.text == rhs.text;
        if (cmp == Predicate::Cmp::ne) return lhs.text != rhs.text;
        throw SchemaError("field '" + field + "': string fields support eq/ne only");
    }
    switch (cmp) {
        case Predicate::Cmp::eq: return lhs.num == rhs.num;
        case Predicate::Cmp::ne: return lhs.num != rhs.num;
        case Predicate::Cmp::lt: return lhs.num < rhs.num;
        case Predicate::Cmp::le: return lhs.num <= rhs.num;
        case Predicate::Cmp::gt: return lhs.num > rhs.num;
        case Predicate::Cmp::ge: return lhs.num >= rhs.num;
    }
    return false;
}

/// evaluates fully (no short-circuit) so evidence covers every referenced field
bool eval_predicate(const Predicate& p, const FieldResolver& resolve,
                    std::vector<std::string>& evidence) {
    switch (p.kind) {
        case Predicate::Kind::all_of: {
            bool all = true;
            for (const auto& c : p.children) all = eval_predicate(*c, resolve, evidence) && all;
            return all;
        }
        case Predicate::Kind::any_of: {
            bool any = false;
            for (const auto& c : p.children) any = eval_predicate(*c, resolve, evidence) || any;
            return any;
        }
        case Predicate::Kind::negate:
            return !eval_predicate(*p.children.front(), resolve, evidence);
        case Predicate::Kind::compare: {
            const FieldValue lhs = resolve(p.field);
            FieldValue rhs;
            if (p.rhs == Predicate::Rhs::number)
                rhs = {false, p.number, {}};
            else if (p.rhs == Predicate::Rhs::text)
                rhs = {true, 0.0, p.text};
            else
                rhs = resolve(p.text);
            std::string note = p.field + "=" + lhs.render();
            if (p.rhs == Predicate::Rhs::field) note += " " + p.text + "=" + rhs.render();
            for (const auto& e : evidence)
                if (e == note) { note.clear(); break; }
            if (!note.empty()) evidence.push_back(note);
            return compare(lhs, p.cmp, rhs, p.field);
        }
    }
    return false;
}

std::string join_evidence(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += " ";
        out += p;
    }
    return out.empty() ? "predicate matched" : out;
}

bool fields_within(const Predicate& p, const std::set<std::string>& registry) {
    if (p.kind == Predicate::Kind::compare) {
        if (!registry.count(p.field)) return false;
        if (p.rhs == Predicate::Rhs::field && !registry.count(p.text)) return false;
        return true;
    }
    for (const auto& c : p.children)
        if (!fields_within(*c, registry)) return false;
    return true;
}

}  // namespace

std::optional<Violation> eval_text_rule(const CompiledRule& rule, const std::string& text,
                                        const TextAnalyzer& analyzer) {
    if (rule.pattern) {
        std::smatch m;
        if (!std::regex_search(text, m, *rule.pattern)) return std::nullopt;
        std::string span = m.str(0);
        if (span.size() > 80) span = span.substr(0, 77) + "...";
        if (span.empty()) span = "pattern matched empty span";
        return Violation{rule.rule.id, rule.rule.type, rule.rule.severity, span};
    }
    const TextFeatures f = analyzer.analyze(text);
    std::vector<std::string> evidence;
    const auto& pred = *std::get<PredicatePtr>(rule.rule.condition);
    const bool hit = eval_predicate(
        pred, [&](const std::string& name) { return resolve_text_field(name, f); }, evidence);
    if (!hit) return std::nullopt;
    return Violation{rule.rule.id, rule.rule.type, rule.rule.severity, join_evidence(evidence)};
}

std::optional<Violation> eval_trading_rule(const CompiledRule& rule, const TradeOrder& order,
                                           const EvaluationContext& ctx) {
    if (rule.pattern) return std::nullopt;  // text patterns do not apply to orders
    std::vector<std::string> evidence;
    const auto& pred = *std::get<PredicatePtr>(rule.rule.condition);
    const bool hit = eval_predicate(
        pred, [&](const std::string& name) { return resolve_trading_field(name, order, ctx); },
        evidence);
    if (!hit) return std::nullopt;
    return Violation{rule.rule.id, rule.rule.type, rule.rule.severity, join_evidence(evidence)};
}

std::vector<Violation> check_action(const Action& action, const EvaluationContext& ctx,
                                    const CompiledRuleSet& rules) {
    std::vector<Violation> out;
    if (action.kind == ActionKind::trade_order) {
        if (!action.order) throw ValidationFailed("trade_order action carries no order");
        for (const auto& cr : rules.rules) {
            if (cr.pattern) continue;
            if (!fields_within(*std::get<PredicatePtr>(cr.rule.condition),
                               field_registry("trading")))
                continue;
            if (auto v = eval_trading_rule(cr, *action.order, ctx)) out.push_back(std::move(*v));
        }
        return out;
    }
    for (const auto& cr : rules.rules) {
        if (!cr.pattern &&
            !fields_within(*std::get<PredicatePtr>(cr.rule.condition), field_registry("essay")))
            continue;
        if (!cr.pattern && ctx.text == nullptr)
            throw ContextMissing("text rule '" + cr.rule.id + "' needs a text analyzer");
        static const TextAnalyzer plain;
        if (auto v = eval_text_rule(cr, action.text, ctx.text ? *ctx.text : plain))
            out.push_back(std::move(*v));
    }
    return out;
}

}  // namespace gaas
