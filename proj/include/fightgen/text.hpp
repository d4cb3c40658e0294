#pragma once

// Locale-independent number formatting and tokenizing for the line-oriented
// file formats.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fightgen::text {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_ws(std::string_view line);

std::string_view trim(std::string_view s);

/// Splits "key=value"; returns nullopt when there is no '='.
std::optional<std::pair<std::string_view, std::string_view>> split_kv(std::string_view token,
                                                                      char sep = '=');

}  // namespace fightgen::text
