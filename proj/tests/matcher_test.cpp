#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gaas/errors.hpp"
#include "gaas/matcher.hpp"

using namespace gaas;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CompiledRuleSetPtr trading_pack() {
    static CompiledRuleSetPtr pack = compile_rule_set(
        parse_rule_set(slurp(std::string(GAAS_DATA_DIR) + "/policies/trading_rules.json")));
    return pack;
}

CompiledRuleSetPtr essay_pack() {
    static CompiledRuleSetPtr pack = compile_rule_set(
        parse_rule_set(slurp(std::string(GAAS_DATA_DIR) + "/policies/essay_rules.json")));
    return pack;
}

Action order_action(OrderSide side, std::int64_t qty, double px, std::string asset = "ACME") {
    Action a;
    a.agent_id = "t";
    a.kind = ActionKind::trade_order;
    a.order = TradeOrder{std::move(asset), side, qty, px};
    return a;
}

Action text_action(std::string text) {
    Action a;
    a.agent_id = "t";
    a.kind = ActionKind::text_output;
    a.text = std::move(text);
    return a;
}

std::vector<std::string> ids(const std::vector<Violation>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) {
        CHECK_FALSE(v.evidence.empty());
        out.push_back(v.rule_id);
    }
    return out;
}

}  // namespace

TEST_CASE("wilder rsi matches the reference oracle") {
    const std::vector<double> base = {44.34, 44.09, 44.15, 43.61, 44.33, 44.83, 45.10, 45.42,
                                      45.84, 46.08, 45.89, 46.03, 45.61, 46.28, 46.28};
    CHECK(compute_rsi(base, 14) == doctest::Approx(70.46413502109705).epsilon(1e-12));

    std::vector<double> ext = base;
    for (double c : {46.00, 46.03, 46.41, 46.22, 45.64}) ext.push_back(c);
    CHECK(compute_rsi(ext, 14) == doctest::Approx(57.91502067008556).epsilon(1e-12));

    std::vector<double> up, down, flat;
    for (int i = 0; i < 15; ++i) {
        up.push_back(100.0 + i);
        down.push_back(100.0 - i);
        flat.push_back(100.0);
    }
    CHECK(compute_rsi(up, 14) == 100.0);
    CHECK(compute_rsi(down, 14) == 0.0);
    CHECK(compute_rsi(flat, 14) == 50.0);

    CHECK_THROWS_AS(compute_rsi({1.0, 2.0, 3.0}, 14), InsufficientData);
    CHECK_THROWS_AS(compute_rsi({1.0, 2.0}, 0), InsufficientData);
}

TEST_CASE("trading rules fire exactly at their thresholds") {
    const auto pack = trading_pack();
    EvaluationContext ctx;
    ctx.portfolio.cash = 10000.0;
    ctx.market.last_close["ACME"] = 10.0;
    ctx.market.rsi["ACME"] = 50.0;

    auto run = [&](const Action& a, const EvaluationContext& c) {
        return ids(check_action(a, c, *pack));
    };

    // position cap: post-trade fraction must exceed 5%, equality passes
    CHECK(run(order_action(OrderSide::buy, 50, 10.0), ctx).empty());  // exactly 0.05
    CHECK(run(order_action(OrderSide::buy, 51, 10.0), ctx) == std::vector<std::string>{"R1"});
    for (std::int64_t q = 51; q <= 150; q += 9)  // monotone in quantity
        CHECK(run(order_action(OrderSide::buy, q, 10.0), ctx) == std::vector<std::string>{"R1"});

    // pacing counts the candidate order itself
    EvaluationContext paced = ctx;
    paced.portfolio.trades_today["ACME"] = 50;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), paced) == std::vector<std::string>{"R2"});
    paced.portfolio.trades_today["ACME"] = 49;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), paced).empty());

    // low-cash buys: strict less-than 500, sells unaffected
    EvaluationContext poor = ctx;
    poor.portfolio.cash = 499.99;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), poor) == std::vector<std::string>{"R3"});
    poor.portfolio.cash = 500.0;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), poor).empty());
    poor.portfolio.cash = 0.0;
    poor.portfolio.holdings["ACME"] = 5;  // full exit keeps the position cap quiet
    CHECK(run(order_action(OrderSide::sell, 5, 10.0), poor).empty());

    // short sales: quantity above holdings, equality is a full exit
    EvaluationContext held = ctx;
    held.portfolio.holdings["ACME"] = 5;
    CHECK(run(order_action(OrderSide::sell, 5, 10.0), held).empty());
    auto vs = check_action(order_action(OrderSide::sell, 6, 10.0), held, *pack);
    REQUIRE(ids(vs) == std::vector<std::string>{"R4"});
    CHECK(vs[0].rule_type == RuleType::coercive);
    CHECK(vs[0].severity == 0.9);
    CHECK(vs[0].evidence.find("shares_held") != std::string::npos);

    // rsi gates: buy above 80, sell below 20, boundaries pass
    EvaluationContext hot = held;
    hot.market.rsi["ACME"] = 80.0;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), hot).empty());
    hot.market.rsi["ACME"] = 80.01;
    CHECK(run(order_action(OrderSide::buy, 1, 10.0), hot) == std::vector<std::string>{"R5"});
    hot.market.rsi["ACME"] = 20.0;
    CHECK(run(order_action(OrderSide::sell, 1, 10.0), hot).empty());
    hot.market.rsi["ACME"] = 19.99;
    CHECK(run(order_action(OrderSide::sell, 1, 10.0), hot) == std::vector<std::string>{"R5"});

    // the rsi rule needs the indicator in context
    EvaluationContext blind = ctx;
    blind.market.rsi.clear();
    CHECK_THROWS_AS(check_action(order_action(OrderSide::buy, 1, 10.0), blind, *pack),
                    ContextMissing);

    // trade actions must carry an order
    Action bare;
    bare.kind = ActionKind::trade_order;
    CHECK_THROWS_AS(check_action(bare, ctx, *pack), ValidationFailed);
}

TEST_CASE("randomized orders agree with an independent re-check") {
    const auto pack = trading_pack();
    const std::array<std::string, 3> assets = {"AAA", "BBB", "CCC"};
    std::mt19937 rng(20250814u);
    std::uniform_real_distribution<double> close_d(5.0, 100.0);
    std::uniform_real_distribution<double> price_d(1.0, 60.0);
    std::uniform_int_distribution<int> qty_d(1, 300);
    std::uniform_int_distribution<int> held_d(0, 60);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pick(0, 9);

    auto cash_sample = [&]() -> double {
        switch (pick(rng)) {
            case 0: return 499.99;
            case 1: return 500.0;
            case 2: return 0.0;
            default: return std::uniform_real_distribution<double>(0.0, 2000.0)(rng);
        }
    };
    auto rsi_sample = [&]() -> double {
        switch (pick(rng)) {
            case 0: return 80.0;
            case 1: return 20.0;
            case 2: return 80.0001;
            case 3: return 19.9999;
            default: return std::uniform_real_distribution<double>(0.0, 100.0)(rng);
        }
    };
    auto trades_sample = [&]() -> int {
        switch (pick(rng)) {
            case 0: return 49;
            case 1: return 50;
            case 2: return 51;
            default: return std::uniform_int_distribution<int>(0, 60)(rng);
        }
    };

    int fired = 0;
    for (int iter = 0; iter < 12000; ++iter) {
        EvaluationContext ctx;
        ctx.portfolio.cash = cash_sample();
        for (const auto& a : assets) {
            ctx.market.last_close[a] = close_d(rng);
            ctx.market.rsi[a] = rsi_sample();
            if (coin(rng)) ctx.portfolio.holdings[a] = held_d(rng);
            ctx.portfolio.trades_today[a] = trades_sample();
        }
        const std::string& asset = assets[std::uniform_int_distribution<int>(0, 2)(rng)];
        const OrderSide side = coin(rng) ? OrderSide::buy : OrderSide::sell;
        const std::int64_t qty = qty_d(rng);
        const double price = price_d(rng);

        // inequality re-check written straight from the rule table
        const double held =
            ctx.portfolio.holdings.count(asset) ? double(ctx.portfolio.holdings.at(asset)) : 0.0;
        const double signed_qty = side == OrderSide::buy ? double(qty) : -double(qty);
        std::map<std::string, std::int64_t> post = ctx.portfolio.holdings;
        post[asset] += std::int64_t(signed_qty);
        const double post_cash = ctx.portfolio.cash - signed_qty * price;
        double equity = post_cash;
        for (const auto& [a, h] : post)
            if (h != 0) equity += double(h) * ctx.market.last_close.at(a);
        const double position = double(post[asset]) * ctx.market.last_close.at(asset);
        double fraction;
        if (equity <= 0.0)
            fraction = position > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        else
            fraction = position / equity;

        std::vector<std::string> want;
        if (fraction > 0.05) want.push_back("R1");
        if (ctx.portfolio.trades_today.at(asset) + 1 > 50) want.push_back("R2");
        if (side == OrderSide::buy && ctx.portfolio.cash < 500.0) want.push_back("R3");
        if (side == OrderSide::sell && double(qty) > held) want.push_back("R4");
        const double rsi = ctx.market.rsi.at(asset);
        if ((side == OrderSide::buy && rsi > 80.0) || (side == OrderSide::sell && rsi < 20.0))
            want.push_back("R5");

        const auto got = ids(check_action(order_action(side, qty, price, asset), ctx, *pack));
        if (got != want) {
            CAPTURE(iter);
            CAPTURE(asset);
            CAPTURE(qty);
            CAPTURE(price);
            CAPTURE(ctx.portfolio.cash);
        }
        REQUIRE(got == want);
        fired += int(!got.empty());
    }
    CHECK(fired > 2000);  // the sampler actually exercises the rules
}

TEST_CASE("text patterns match case-insensitively and carry the span") {
    const auto pack = essay_pack();
    TextAnalyzer plain;

    const auto& hate_rule = pack->rules[0];  // coercive wording rule
    auto v = eval_text_rule(hate_rule, "They spread HATE in the forum.", plain);
    REQUIRE(v.has_value());
    CHECK(v->rule_id == "R1");
    CHECK(v->rule_type == RuleType::coercive);
    CHECK(v->evidence == "HATE");
    CHECK_FALSE(eval_text_rule(hate_rule, "a perfectly civil note", plain).has_value());

    // long matches are truncated to an 80-char span
    const auto& fake_rule = pack->rules[4];
    std::string text = "As an AI assistant with a famously long-winded disclaimer style "
                       "honed over many rounds of reviews, but here is how to do it.";
    auto w = eval_text_rule(fake_rule, text, plain);
    REQUIRE(w.has_value());
    CHECK(w->evidence.size() == 80);
    CHECK(w->evidence.substr(77) == "...");

    // pattern rules never apply to orders
    EvaluationContext ctx;
    CHECK_FALSE(eval_trading_rule(hate_rule, TradeOrder{"ACME", OrderSide::buy, 1, 1.0}, ctx)
                    .has_value());
}

TEST_CASE("check_action reports text violations in rule-set order") {
    const auto pack = essay_pack();
    TextAnalyzer an;
    an.add_reference_text(
        "The committee reviewed the proposal in detail and found the budget assumptions sound "
        "after two rounds of questions from the floor.");
    EvaluationContext ctx;
    ctx.text = &an;

    // a one-word draft trips structure, contrast, and length together
    CHECK(ids(check_action(text_action("hello"), ctx, *pack)) ==
          std::vector<std::string>{"R3", "R4", "R6"});

    // claim markers without evidence add the support rule at its slot
    CHECK(ids(check_action(text_action("Clearly this is the best option."), ctx, *pack)) ==
          std::vector<std::string>{"R3", "R4", "R6", "R8"});

    // verbatim reuse of the reference lifts overlap to 1.0
    CHECK(ids(check_action(text_action("The committee reviewed the proposal in detail and "
                                       "found the budget assumptions sound after two rounds "
                                       "of questions from the floor."),
                           ctx, *pack)) ==
          std::vector<std::string>{"R2", "R3", "R4", "R6"});

    // predicate rules demand an analyzer
    EvaluationContext no_analyzer;
    CHECK_THROWS_AS(check_action(text_action("hello"), no_analyzer, *pack), ContextMissing);
}
