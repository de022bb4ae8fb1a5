#pragma once

// Canonical numeric rendering: shortest decimal string that round-trips the
// exact double. Everything that lands in an artifact file goes through these
// two functions so that re-reading a file reproduces bit-identical values.

#include <optional>
#include <string>

namespace gaas::detail {

std::string render_double(double v);

/// strict parse of a full string (surrounding whitespace allowed), nullopt otherwise
std::optional<double> parse_double(const std::string& text);

std::optional<long long> parse_int(const std::string& text);

/// trims ASCII whitespace from both ends
std::string trim(const std::string& s);

}  // namespace gaas::detail
