#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mcgp {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

inline constexpr std::string_view kToolName = "mcgp";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace mcgp
