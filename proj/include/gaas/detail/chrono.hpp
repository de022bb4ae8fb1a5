#pragma once

// UTC timestamp helpers. All timestamps in the system are integral unix
// seconds rendered as ISO-8601 with a trailing Z; no locale, no local time.

#include <cstdint>
#include <optional>
#include <string>

namespace gaas::detail {

/// days since 1970-01-01 for a proleptic Gregorian civil date
std::int64_t days_from_civil(int y, unsigned m, unsigned d);

/// inverse of days_from_civil
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

/// "2025-05-01T13:25:48Z"
std::string format_iso8601(std::int64_t epoch_seconds);

/// parses the exact format emitted by format_iso8601; nullopt on anything else
std::optional<std::int64_t> parse_iso8601(const std::string& text);

/// "2025-05-01" date-only rendering (used by market data and ledgers)
std::string format_date(std::int64_t epoch_seconds);

/// parses "YYYY-MM-DD" to midnight UTC; nullopt on anything else
std::optional<std::int64_t> parse_date(const std::string& text);

}  // namespace gaas::detail
