#include "gaas/sim/market.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/detail/rng.hpp"
#include "gaas/errors.hpp"

namespace gaas::sim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kHeader = "date,open,high,low,close,volume";

double cents(double v) { return std::round(v * 100.0) / 100.0; }

std::string format_price(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::vector<MarketBar> read_market_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open market file: " + path);
    std::vector<MarketBar> bars;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (detail::trim(line) != kHeader)
                throw FormatError(path + " line 1: expected header '" + std::string(kHeader) + "'");
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
        if (f.size() != 6)
            throw FormatError(path + " line " + std::to_string(line_no) + ": expected 6 fields");
        MarketBar b;
        const auto date = detail::parse_date(detail::trim(f[0]));
        if (!date)
            throw FormatError(path + " line " + std::to_string(line_no) + ": bad date '" + f[0] + "'");
        b.date = *date;
        const auto open = detail::parse_double(f[1]);
        const auto high = detail::parse_double(f[2]);
        const auto low = detail::parse_double(f[3]);
        const auto close = detail::parse_double(f[4]);
        const auto volume = detail::parse_int(f[5]);
        if (!open || !high || !low || !close || !volume)
            throw FormatError(path + " line " + std::to_string(line_no) + ": bad numeric field");
        b.open = *open;
        b.high = *high;
        b.low = *low;
        b.close = *close;
        b.volume = *volume;
        if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close) ||
            b.volume < 0)
            throw FormatError(path + " line " + std::to_string(line_no) + ": malformed bar");
        if (!bars.empty()) {
            if (b.date == bars.back().date)
                throw NonMonotonicDates(path + " line " + std::to_string(line_no) +
                                        ": duplicate date");
            if (b.date < bars.back().date)
                throw NonMonotonicDates(path + " line " + std::to_string(line_no) +
                                        ": dates must ascend");
        }
        bars.push_back(b);
    }
    return bars;
}

void write_market_csv(const std::string& path, const std::vector<MarketBar>& bars) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write market file: " + path);
    out << kHeader << '\n';
    for (const auto& b : bars)
        out << detail::format_date(b.date) << ',' << format_price(b.open) << ','
            << format_price(b.high) << ',' << format_price(b.low) << ',' << format_price(b.close)
            << ',' << b.volume << '\n';
}

std::map<std::string, std::vector<MarketBar>> load_market_csv(const std::string& dir) {
    std::map<std::string, std::vector<MarketBar>> out;
    if (!fs::is_directory(dir)) throw StorageError("not a market data directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        out[entry.path().stem().string()] = read_market_csv(entry.path().string());
    }
    if (out.empty()) throw StorageError("no market csv files in " + dir);
    return out;
}

std::map<std::string, std::vector<MarketBar>> generate_market_data(
    std::uint64_t seed, const std::vector<std::string>& assets, int days,
    const std::string& start_date, double base_price) {
    const auto start = detail::parse_date(start_date);
    if (!start) throw ConfigError("bad start date '" + start_date + "'");
    std::map<std::string, std::vector<MarketBar>> out;
    detail::Rng root(seed);
    for (const auto& asset : assets) {
        detail::Rng rng = root.fork("asset:" + asset);
        double prev_close = cents(base_price * (0.8 + 0.4 * rng.uniform()));
        std::vector<MarketBar> bars;
        for (int d = 0; d < days; ++d) {
            MarketBar b;
            b.date = *start + static_cast<std::int64_t>(d) * 86400;
            b.open = prev_close;
            const double ret = 0.0004 + 0.012 * rng.normal();
            double close = cents(std::max(1.0, prev_close * (1.0 + ret)));
            b.close = close;
            const double hi_pad = std::abs(rng.normal()) * 0.004;
            const double lo_pad = std::abs(rng.normal()) * 0.004;
            b.high = cents(std::max(b.open, b.close) * (1.0 + hi_pad));
            b.low = cents(std::min(b.open, b.close) * (1.0 - lo_pad));
            if (b.high < std::max(b.open, b.close)) b.high = std::max(b.open, b.close);
            if (b.low > std::min(b.open, b.close)) b.low = std::min(b.open, b.close);
            b.volume = 50000 + static_cast<std::int64_t>(rng.next_u64() % 150000);
            bars.push_back(b);
            prev_close = close;
        }
        out[asset] = std::move(bars);
    }
    return out;
}

std::vector<MarketBar> generate_zigzag(int days, const std::string& start_date,
                                       double base_price) {
    const auto start = detail::parse_date(start_date);
    if (!start) throw ConfigError("bad start date '" + start_date + "'");
    std::vector<MarketBar> bars;
    double prev_close = base_price;
    for (int d = 0; d < days; ++d) {
        MarketBar b;
        b.date = *start + static_cast<std::int64_t>(d) * 86400;
        b.open = prev_close;
        b.close = cents(base_price + (d % 2 == 1 ? 0.50 : 0.00));
        b.high = cents(std::max(b.open, b.close) + 0.10);
        b.low = cents(std::min(b.open, b.close) - 0.10);
        b.volume = 100000;
        bars.push_back(b);
        prev_close = b.close;
    }
    return bars;
}

PortfolioState execute_trade(const PortfolioState& p, const TradeOrder& order, double close) {
    PortfolioState next = p;
    const double cost = static_cast<double>(order.quantity) * close;
    if (order.side == OrderSide::buy) {
        if (cost > next.cash + 1e-9)
            throw InsufficientCash("buy of " + std::to_string(order.quantity) + " " + order.asset +
                                   " costs " + detail::render_double(cost) + " with cash " +
                                   detail::render_double(next.cash));
        next.cash -= cost;
        next.holdings[order.asset] += order.quantity;
    } else {
        const auto held = next.holdings[order.asset];
        if (order.quantity > held)
            throw Error("cannot fill sell of " + std::to_string(order.quantity) + " " +
                        order.asset + " with " + std::to_string(held) + " held");
        next.cash += cost;
        next.holdings[order.asset] -= order.quantity;
    }
    ++next.trades_today[order.asset];
    return next;
}

double mark_to_market(const PortfolioState& p, const std::map<std::string, double>& last_close) {
    double eq = p.cash;
    for (const auto& [asset, shares] : p.holdings) {
        if (shares == 0) continue;
        const auto it = last_close.find(asset);
        if (it == last_close.end()) throw ContextMissing("no close for held asset " + asset);
        eq += static_cast<double>(shares) * it->second;
    }
    return eq;
}

}  // namespace gaas::sim
