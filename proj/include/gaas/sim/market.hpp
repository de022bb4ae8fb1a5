#pragma once

// Synthetic market data and execution. Bars are daily OHLCV per asset; fills
// happen at the same day's close with no fees. The bundled dataset is emitted
// by the deterministic generator below, which doubles as its own oracle.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gaas/matcher.hpp"

namespace gaas::sim {

struct MarketBar {
    std::int64_t date{0};  // midnight UTC
    double open{0}, high{0}, low{0}, close{0};
    std::int64_t volume{0};
};

/// one file per asset, header date,open,high,low,close,volume; rows must be
/// sorted ascending, duplicate dates raise NonMonotonicDates
std::vector<MarketBar> read_market_csv(const std::string& path);

void write_market_csv(const std::string& path, const std::vector<MarketBar>& bars);

/// loads every *.csv in a directory; the asset name is the file stem
std::map<std::string, std::vector<MarketBar>> load_market_csv(const std::string& dir);

/// seeded geometric random walk, prices rounded to cents
std::map<std::string, std::vector<MarketBar>> generate_market_data(
    std::uint64_t seed, const std::vector<std::string>& assets, int days,
    const std::string& start_date = "2025-01-02", double base_price = 100.0);

/// alternating up/down closes; RSI stays pinned near 50 (replay fixtures)
std::vector<MarketBar> generate_zigzag(int days, const std::string& start_date = "2025-01-02",
                                       double base_price = 100.0);

/// fills at the given close; throws InsufficientCash on a buy overdraw and
/// Error on a sell past holdings (governance should have prevented both)
PortfolioState execute_trade(const PortfolioState& p, const TradeOrder& order, double close);

/// cash plus holdings marked at the supplied closes
double mark_to_market(const PortfolioState& p, const std::map<std::string, double>& last_close);

}  // namespace gaas::sim
